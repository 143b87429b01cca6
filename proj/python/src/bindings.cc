// Copyright 2026 The mcomplete Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "mcomplete/cleaning.h"
#include "mcomplete/error.h"
#include "mcomplete/grassmann.h"
#include "mcomplete/harness.h"
#include "mcomplete/io.h"
#include "mcomplete/metrics.h"
#include "mcomplete/pipeline.h"
#include "mcomplete/sampling.h"
#include "mcomplete/svd.h"
#include "mcomplete/trim.h"

namespace py = pybind11;
using namespace mcomplete;

namespace {

SparseObserved make_sparse(int rows, int cols, const std::vector<int>& i,
                           const std::vector<int>& j, const std::vector<double>& v) {
  if (i.size() != j.size() || i.size() != v.size()) {
    throw std::invalid_argument("row, col and value arrays differ in length");
  }
  std::vector<Entry> entries;
  entries.reserve(i.size());
  for (std::size_t k = 0; k < i.size(); ++k) entries.push_back({i[k], j[k], v[k]});
  return SparseObserved(rows, cols, std::move(entries));
}

py::dict error_dict(const ErrorReport& e) {
  py::dict d;
  d["rmse"] = e.rmse;
  d["rel_frobenius"] = e.rel_frobenius;
  d["max_abs_error"] = e.max_abs_error;
  d["m_max"] = e.m_max;
  d["rmse_sq_bound"] = e.rmse_sq_bound;
  d["exact"] = e.exact;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Low-rank matrix completion from a few revealed entries";
  m.attr("__version__") = library_version();

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<LowRankFactors>(m, "LowRankFactors")
      .def(py::init([](DenseMatrix u, Vector sigma, DenseMatrix v) {
             LowRankFactors f{std::move(u), std::move(sigma), std::move(v)};
             f.validate(1e-8);
             return f;
           }),
           py::arg("u"), py::arg("sigma"), py::arg("v"))
      .def_readonly("u", &LowRankFactors::u)
      .def_readonly("sigma", &LowRankFactors::sigma)
      .def_readonly("v", &LowRankFactors::v)
      .def_property_readonly("shape",
                             [](const LowRankFactors& f) {
                               return py::make_tuple(f.rows(), f.cols());
                             })
      .def_property_readonly("rank", &LowRankFactors::rank)
      .def("dense", &LowRankFactors::dense)
      .def("entry", &LowRankFactors::entry);

  py::class_<SparseObserved>(m, "SparseObserved")
      .def(py::init(&make_sparse), py::arg("rows"), py::arg("cols"),
           py::arg("row_index"), py::arg("col_index"), py::arg("values"))
      .def_property_readonly("shape",
                             [](const SparseObserved& a) {
                               return py::make_tuple(a.rows(), a.cols());
                             })
      .def("__len__", &SparseObserved::size)
      .def("to_dense", &SparseObserved::to_dense)
      .def("row_degrees", &SparseObserved::row_degrees)
      .def("col_degrees", &SparseObserved::col_degrees)
      .def("triplets", [](const SparseObserved& a) {
        std::vector<int> i, j;
        std::vector<double> v;
        for (const Entry& e : a.entries()) {
          i.push_back(e.row);
          j.push_back(e.col);
          v.push_back(e.value);
        }
        return py::make_tuple(i, j, v);
      });

  m.def("random_low_rank",
        [](int m, int n, int r, std::vector<double> sigma, std::uint64_t seed) {
          if (sigma.empty()) sigma.assign(std::max(r, 0), 1.0);
          return random_low_rank(m, n, r, std::move(sigma), seed);
        },
        py::arg("m"), py::arg("n"),
        py::arg("r"), py::arg("sigma") = std::vector<double>{}, py::arg("seed") = 0);
  m.def(
      "reveal",
      [](const LowRankFactors& f, const std::string& model, double amount,
         std::uint64_t seed) {
        switch (parse_reveal_kind(model)) {
          case RevealKind::kUniformFixedSize:
            return reveal(f, RevealModel::uniform(static_cast<std::int64_t>(amount), seed));
          case RevealKind::kBernoulli:
            return reveal(f, RevealModel::bernoulli(amount, seed));
          case RevealKind::kHeavyTailRows:
            return reveal(f, RevealModel::heavy_tail(amount, seed));
        }
        throw std::invalid_argument("unknown reveal model");
      },
      py::arg("factors"), py::arg("model"), py::arg("amount"), py::arg("seed") = 0,
      "Uniform takes |E|; bernoulli and heavytail take eps.");

  m.def("trim", [](const SparseObserved& a) { return trim(a).trimmed; });
  m.def("project_tr",
        [](const SparseObserved& trimmed, int r, std::int64_t num_revealed) {
          return project_tr(trimmed, r, num_revealed);
        },
        py::arg("trimmed"), py::arg("r"), py::arg("num_revealed"));
  m.def("top_r_svd",
        [](const SparseObserved& a, int r) {
          const SvdTriplet s = top_r_svd(a, r);
          return py::make_tuple(s.left, s.values, s.right);
        },
        py::arg("a"), py::arg("r"));

  m.def("principal_angles", [](const DenseMatrix& x1, const DenseMatrix& x2) {
    return principal_angles(Frame(x1, 1e-8), Frame(x2, 1e-8));
  });
  m.def("distances", [](const DenseMatrix& x1, const DenseMatrix& x2) {
    const Distances d = distances(Frame(x1, 1e-8), Frame(x2, 1e-8));
    py::dict out;
    out["geodesic"] = d.geodesic;
    out["chordal"] = d.chordal;
    out["projection"] = d.projection;
    return out;
  });
  m.def("solve_s", [](const DenseMatrix& x, const DenseMatrix& y,
                      const SparseObserved& e) {
    return solve_s({Frame(x, 1e-8), Frame(y, 1e-8)}, e).s;
  });
  m.def("cost_f", [](const DenseMatrix& x, const DenseMatrix& y,
                     const SparseObserved& e) {
    return cost_f({Frame(x, 1e-8), Frame(y, 1e-8)}, e).value;
  });

  m.def(
      "complete",
      [](const SparseObserved& observed, int rank, bool skip_clean, int max_iters,
         double fit_tol, double grad_tol, const std::string& rho_rule) {
        PipelineConfig cfg;
        cfg.rank = rank;
        cfg.skip_clean = skip_clean;
        cfg.cleaning.max_iters = max_iters;
        cfg.cleaning.fit_tol = fit_tol;
        cfg.cleaning.grad_tol = grad_tol;
        cfg.rho_rule = parse_rho_rule(rho_rule);
        CompletionResult res;
        {
          py::gil_scoped_release release;
          res = complete(observed, cfg);
        }
        py::dict out;
        out["reconstruction"] = res.reconstruction;
        out["projection"] = res.projection;
        out["cleaned"] = res.cleaned;
        out["mu0"] = res.mu0;
        out["residual_start"] = res.residual_start;
        out["residual_final"] = res.residual_final;
        if (res.cleaning) {
          out["iterations"] = res.cleaning->iterations;
          out["stop_reason"] = to_string(res.cleaning->reason);
        }
        return out;
      },
      py::arg("observed"), py::arg("rank"), py::arg("skip_clean") = false,
      py::arg("max_iters") = 500, py::arg("fit_tol") = 1e-12,
      py::arg("grad_tol") = -1.0,
      py::arg("rho_rule") = "n_eps");

  m.def(
      "rmse",
      [](const LowRankFactors& truth, const LowRankFactors& approx,
         std::int64_t num_revealed) {
        MetricsOptions opts;
        opts.num_revealed = num_revealed;
        return error_dict(rmse(truth, approx, opts));
      },
      py::arg("truth"), py::arg("approx"), py::arg("num_revealed") = 0);

  m.def("read_matrix_market", &read_matrix_market_file);
  m.def("write_matrix_market", &write_matrix_market_file);
  m.def("read_factors", &read_factors_file);
  m.def("write_factors", &write_factors_file);

  m.def("_run_experiment", [](const std::string& spec_json) {
    Json merged = ExperimentSpec{}.to_json();
    merged.merge_patch(Json::parse(spec_json));
    const ExperimentSpec spec = ExperimentSpec::from_json(merged);
    ExperimentResult res;
    {
      py::gil_scoped_release release;
      res = run_experiment(spec);
    }
    std::vector<std::string> runs;
    for (const RunRecord& r : res.runs) runs.push_back(to_json(r).dump());
    return py::make_tuple(res.summary.dump(), runs);
  });
}
