// Copyright 2026 The connshift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python bindings for the analysis primitives and the experiment runner.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "connshift/audit/audit.h"
#include "connshift/corpus/io.h"
#include "connshift/error.h"
#include "connshift/factors/factors.h"
#include "connshift/filtering/filter.h"
#include "connshift/harness/config.h"
#include "connshift/harness/experiment.h"
#include "connshift/harness/synthetic.h"
#include "connshift/jointmodel/gumbel.h"
#include "connshift/nn/rng.h"

namespace py = pybind11;
using namespace connshift;

namespace {

std::vector<filtering::ScoredExample> ToScored(
    const std::vector<std::tuple<std::string, std::string, double>>& rows) {
  std::vector<filtering::ScoredExample> out;
  for (const auto& [id, rel, score] : rows) out.push_back({id, rel, score});
  return out;
}

Eigen::VectorXd ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> FromVector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

PYBIND11_MODULE(_connshift, m) {
  m.doc() = "connshift core";

  static py::exception<Error> base(m, "Error");
  static py::exception<IoError> io_error(m, "IoError", base.ptr());
  static py::exception<DataError> data_error(m, "DataError", base.ptr());
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  static py::exception<UsageError> usage_error(m, "UsageError", base.ptr());
  static py::exception<UndefinedError> undefined_error(m, "UndefinedError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    } catch (const DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const UsageError& e) {
      py::set_error(usage_error, e.what());
    } catch (const UndefinedError& e) {
      py::set_error(undefined_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  // filtering
  m.def("relation_thresholds",
        [](const std::vector<std::tuple<std::string, std::string, double>>& rows) {
          const auto ex = ToScored(rows);
          return filtering::PerRelationThresholds(ex);
        },
        py::arg("rows"), "Mean score per relation of (id, relation, score) rows.");
  m.def("filter_indices",
        [](const std::vector<std::tuple<std::string, std::string, double>>& rows,
           std::optional<double> floor) {
          const auto ex = ToScored(rows);
          return filtering::FilterCorpus(ex, filtering::PerRelationThresholds(ex), floor);
        },
        py::arg("rows"), py::arg("floor") = py::none(),
        "Indices of rows kept by relation-average filtering.");

  // Gumbel-Softmax and losses
  m.def("gumbel_softmax",
        [](const std::vector<double>& p, double tau, const std::vector<double>& noise) {
          return FromVector(jointmodel::GumbelSoftmax(p, tau, ToVector(noise)));
        },
        py::arg("p"), py::arg("tau"), py::arg("noise"));
  m.def("sample_gumbel",
        [](const std::vector<double>& p, double tau, std::uint64_t seed) {
          nn::Rng rng(seed);
          return FromVector(jointmodel::SampleGumbel(p, tau, rng).c);
        },
        py::arg("p"), py::arg("tau") = 1.0, py::arg("seed") = 0);
  m.def("cross_entropy",
        [](const std::vector<double>& p, int gold) { return jointmodel::CrossEntropy(p, gold); },
        py::arg("p"), py::arg("gold"));
  m.def("combine_joint_loss", &jointmodel::CombineJointLoss, py::arg("conn_loss"),
        py::arg("rel_loss"), py::arg("weight") = 0.5);
  m.def("entropy", [](const std::vector<double>& p) { return jointmodel::Entropy(p); });

  // statistics
  m.def("pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) {
          const auto c = factors::Pearson(x, y);
          return std::make_pair(c.r, c.p_value);
        },
        py::arg("x"), py::arg("y"), "Returns (r, two-sided p-value).");
  m.def("gbdt_importance",
        [](const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
           int num_trees, int max_depth) {
          factors::GbdtConfig cfg;
          cfg.num_trees = num_trees;
          cfg.max_depth = max_depth;
          return factors::GbdtImportance(rows, y, cfg);
        },
        py::arg("rows"), py::arg("targets"), py::arg("num_trees") = 100,
        py::arg("max_depth") = 4);
  m.def("cohen_kappa",
        [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
          return audit::CohenKappa(a, b);
        });

  // audit
  m.def("categorize",
        [](const std::string& new_labels, const std::string& original) {
          return std::string(audit::ToString(audit::Categorize(audit::MakePair("", new_labels, original))));
        },
        py::arg("new_labels"), py::arg("original"),
        "Shift case of one pair; new_labels is ';'-separated.");
  m.def("categorize_shifts",
        [](const std::vector<std::pair<std::string, std::string>>& pairs) {
          std::vector<audit::AnnotationPair> ap;
          for (std::size_t i = 0; i < pairs.size(); ++i) {
            ap.push_back(audit::MakePair(std::to_string(i), pairs[i].first, pairs[i].second));
          }
          const auto c = audit::CategorizeShifts(ap);
          return std::map<std::string, int>{{"pairs", c.pairs},
                                            {"shift_num", c.shift_num},
                                            {"case1", c.case1},
                                            {"case2", c.case2},
                                            {"case3", c.case3}};
        },
        py::arg("pairs"));

  // corpora and experiments
  m.def("write_synthetic",
        [](const std::filesystem::path& dir, std::uint64_t seed) {
          harness::SyntheticOptions o = harness::SyntheticOptions::Default();
          o.seed = seed;
          const auto syn = harness::GenerateSynthetic(o);
          auto all = syn.explicit_examples;
          all.insert(all.end(), syn.implicit_examples.begin(), syn.implicit_examples.end());
          corpus::WriteCorpusDir(dir, all);
          return o.PlantedShiftRate();
        },
        py::arg("dir"), py::arg("seed") = 7,
        "Writes the synthetic corpus; returns its planted shift rate.");
  m.def("run_experiment_json",
        [](const std::string& config_text) {
          harness::ExperimentConfig c = harness::ParseConfig(config_text);
          harness::ApplyEnvironment(c);
          py::gil_scoped_release release;
          return harness::RunExperiment(c).ToJson().dump();
        },
        py::arg("config_text"), "Runs one mode; returns the report as JSON text.");
}
