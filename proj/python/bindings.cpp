// Python bindings for the core operations: families and set I/O, the Gram
// form and weight solve, reflections, spectra, the see-saw and grid
// estimates, PPT reports, witness construction/validation, and the full
// analysis pipeline (returned as a JSON string; the package parses it).

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "upbwit/construct.hpp"
#include "upbwit/report.hpp"
#include "upbwit/separability.hpp"
#include "upbwit/states.hpp"

namespace py = pybind11;

using namespace upbwit;
using construct::Density;
using construct::PVec;
using linalg::cplx;
using linalg::Dims;
using linalg::Matrix;
using states::ProductStateSet;
using states::ProductVector;

namespace {

using NpComplex = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const NpComplex& arr) {
    if (arr.ndim() != 2) throw py::value_error("expected a 2-D complex array");
    Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    const auto view = arr.unchecked<2>();
    for (py::ssize_t i = 0; i < arr.shape(0); ++i)
        for (py::ssize_t j = 0; j < arr.shape(1); ++j)
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = view(i, j);
    return m;
}

py::array_t<cplx> from_matrix(const Matrix& m) {
    py::array_t<cplx> out({m.rows(), m.cols()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            view(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
    return out;
}

py::array_t<double> from_qmatrix(const states::QMatrix& q) {
    py::array_t<double> out({q.size, q.size});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < q.size; ++r)
        for (std::size_t k = 0; k < q.size; ++k)
            view(static_cast<py::ssize_t>(r), static_cast<py::ssize_t>(k)) = q.at(r, k);
    return out;
}

states::QMatrix to_qmatrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2 || arr.shape(0) != arr.shape(1))
        throw py::value_error("expected a square 2-D real array");
    states::QMatrix q;
    q.size = static_cast<std::size_t>(arr.shape(0));
    q.entries.resize(q.size * q.size);
    const auto view = arr.unchecked<2>();
    for (std::size_t r = 0; r < q.size; ++r)
        for (std::size_t k = 0; k < q.size; ++k)
            q.entries[r * q.size + k] = view(static_cast<py::ssize_t>(r),
                                             static_cast<py::ssize_t>(k));
    return q;
}

Density to_density(const NpComplex& arr, const std::vector<std::size_t>& dims) {
    return Density::make(to_matrix(arr), Dims(dims));
}

py::list factors_to_list(const ProductVector& v) {
    py::list out;
    for (const auto& f : v.factors) {
        py::array_t<cplx> arr(static_cast<py::ssize_t>(f.size()));
        auto view = arr.mutable_unchecked<1>();
        for (std::size_t i = 0; i < f.size(); ++i)
            view(static_cast<py::ssize_t>(i)) = f[i];
        out.append(arr);
    }
    return out;
}

py::dict ppt_to_dict(const separability::PptReport& rep) {
    py::list verdicts;
    for (const auto& v : rep.verdicts) {
        py::dict d;
        d["subset"] = v.subset;
        d["psd"] = v.psd;
        d["min_eigenvalue"] = v.min_eigenvalue;
        verdicts.append(d);
    }
    py::dict out;
    out["verdicts"] = verdicts;
    out["all_psd"] = rep.all_psd();
    out["min_eigenvalue"] = rep.min_eigenvalue();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "inseparable PPT states and entanglement witnesses from unextendible product bases";

    py::class_<ProductStateSet>(m, "ProductStateSet")
        .def_property_readonly("dims",
                               [](const ProductStateSet& s) { return s.dims.local; })
        .def_property_readonly("name", [](const ProductStateSet& s) { return s.name; })
        .def("__len__", &ProductStateSet::size)
        .def("member", [](const ProductStateSet& s, std::size_t k) {
            if (k >= s.size()) throw py::index_error();
            return factors_to_list(s.members[k]);
        })
        .def("to_json", &states::product_state_set_to_json);

    m.def("family", &states::make_family, py::arg("name"), py::arg("t") = 0.0);
    m.def("family_names", &states::family_names);
    m.def("load_set", &states::load_product_state_set_file, py::arg("path"),
          py::arg("normalize") = false);
    m.def(
        "set_from_factors",
        [](const std::vector<std::size_t>& dims,
           const std::vector<std::vector<std::vector<cplx>>>& members, const std::string& name) {
            std::vector<ProductVector> vs;
            for (const auto& factors : members) vs.push_back(ProductVector::make(factors));
            return ProductStateSet::make(Dims(dims), std::move(vs), name);
        },
        py::arg("dims"), py::arg("members"), py::arg("name") = "custom");

    m.def("gram_q",
          [](const ProductStateSet& s) { return from_qmatrix(states::gram_q(s)); });

    m.def("is_unextendible", [](const ProductStateSet& s) {
        const auto cert = states::is_unextendible(s);
        py::dict out;
        out["extendible"] = cert.extendible();
        out["partitions_examined"] = cert.partitions_examined;
        if (cert.witness_partition) out["witness_partition"] = *cert.witness_partition;
        if (cert.witness_vector) out["witness_vector"] = factors_to_list(*cert.witness_vector);
        return out;
    });

    m.def("check_subset_basis_condition", &states::check_subset_basis_condition);

    m.def("solve_condition2", [](const py::array_t<double>& q) {
        const auto sol = construct::solve_condition2(to_qmatrix(q));
        py::dict out;
        out["p"] = sol.p.weights;
        out["c"] = sol.c;
        out["row_sum_hypothesis"] = sol.row_sum_hypothesis;
        return out;
    });

    m.def("mu_of_p", [](const ProductStateSet& s, const std::vector<double>& p) {
        return from_matrix(construct::mu_of_p(s, PVec::make(p)).mat);
    });

    m.def(
        "rho_of_p",
        [](const ProductStateSet& s, const std::vector<double>& p, double b) {
            const auto refl = construct::rho_of_p(s, PVec::make(p), b);
            py::dict out;
            out["rho"] = from_matrix(refl.rho.mat);
            out["b"] = refl.b;
            out["null_dim"] = refl.null_dim;
            return out;
        },
        py::arg("set"), py::arg("p"), py::arg("b"));

    m.def(
        "reflect_through_identity",
        [](const NpComplex& mu, const std::vector<std::size_t>& dims, double b) {
            const auto refl = construct::reflect_through_identity(to_density(mu, dims), b);
            py::dict out;
            out["rho"] = from_matrix(refl.rho.mat);
            out["b"] = refl.b;
            out["null_dim"] = refl.null_dim;
            return out;
        },
        py::arg("mu"), py::arg("dims"), py::arg("b"));

    m.def("r_matrix_spectrum",
          [](const ProductStateSet& s, const std::vector<double>& p) {
              const auto spec = construct::r_matrix_spectrum(s, PVec::make(p));
              py::dict out;
              out["eigenvalues"] = spec.eigenvalues;
              out["eigenvectors"] = from_matrix(spec.eigenvectors);
              return out;
          });

    m.def("evaluate_conditions",
          [](const ProductStateSet& s, const std::vector<double>& p, double inf_value) {
              const auto rep = construct::evaluate_conditions(s, PVec::make(p), inf_value);
              py::dict out;
              out["cond1"] = rep.cond1;
              out["cond2"] = rep.cond2;
              out["cond3"] = rep.cond3;
              out["lhs"] = rep.lhs;
              out["rhs"] = rep.rhs;
              out["lambda_max"] = rep.lambda_max;
              out["tr_mu0_sq"] = rep.tr_mu0_sq;
              out["b"] = rep.b;
              out["s0"] = rep.s0;
              out["sanity_interval"] = rep.sanity_interval;
              return out;
          },
          py::arg("set"), py::arg("p"), py::arg("epsilon_lambda_max"));

    m.def(
        "build_witness",
        [](const ProductStateSet& s, const std::vector<double>& p, double inf_value,
           bool force) {
            const auto wit = construct::build_witness(s, PVec::make(p), inf_value, force);
            py::dict out;
            out["matrix"] = from_matrix(wit.mat);
            out["s0"] = wit.s0;
            out["c0"] = wit.c0;
            out["tau0"] = from_matrix(wit.tau0.mat);
            out["rho0"] = from_matrix(wit.rho0.mat);
            return out;
        },
        py::arg("set"), py::arg("p"), py::arg("epsilon_lambda_max"), py::arg("force") = false);

    m.def("pmax_threshold", &construct::pmax_threshold, py::arg("n_total"), py::arg("m"),
          py::arg("epsilon"));
    m.def("frustum_threshold", &construct::frustum_threshold, py::arg("n_total"), py::arg("m"),
          py::arg("p_max"), py::arg("s0"));

    m.def(
        "lambda_of_t",
        [](const NpComplex& rho_b, const std::vector<std::size_t>& dims, double t) {
            return from_matrix(construct::lambda_of_t(to_density(rho_b, dims), t).mat);
        },
        py::arg("rho_b"), py::arg("dims"), py::arg("t"));

    m.def("kron", [](const NpComplex& a, const NpComplex& b) {
        return from_matrix(linalg::kron(to_matrix(a), to_matrix(b)));
    });

    m.def("trace_inner", [](const NpComplex& a, const NpComplex& b) {
        return linalg::trace_inner(to_matrix(a), to_matrix(b));
    });

    m.def(
        "partial_transpose",
        [](const NpComplex& rho, const std::vector<std::size_t>& dims,
           const std::vector<std::size_t>& subset) {
            return from_matrix(linalg::partial_transpose(to_matrix(rho), Dims(dims), subset));
        },
        py::arg("rho"), py::arg("dims"), py::arg("subset"));

    m.def("hermitian_eig", [](const NpComplex& a) {
        const auto spec = linalg::hermitian_eig(to_matrix(a));
        return py::make_tuple(spec.eigenvalues, from_matrix(spec.eigenvectors));
    });

    m.def(
        "is_psd",
        [](const NpComplex& a, double tol) {
            const auto check = linalg::is_psd(to_matrix(a), tol);
            return py::make_tuple(check.psd, check.min_eigenvalue);
        },
        py::arg("a"), py::arg("tol") = 1e-9);

    m.def(
        "epsilon_seesaw",
        [](const NpComplex& mu, const std::vector<std::size_t>& dims, std::size_t restarts,
           std::uint64_t seed) {
            const auto est =
                separability::epsilon_seesaw(to_density(mu, dims), restarts, seed);
            py::dict out;
            out["value"] = est.value;
            out["argmin"] = factors_to_list(est.argmin);
            out["restarts_used"] = est.restarts_used;
            out["converged"] = est.converged;
            return out;
        },
        py::arg("mu"), py::arg("dims"), py::arg("restarts") = 256, py::arg("seed") = 0);

    m.def(
        "epsilon_grid_oracle",
        [](const NpComplex& mu, const std::vector<std::size_t>& dims, std::size_t resolution) {
            return separability::epsilon_grid_oracle(to_density(mu, dims), resolution);
        },
        py::arg("mu"), py::arg("dims"), py::arg("resolution"));

    m.def(
        "is_ppt",
        [](const NpComplex& rho, const std::vector<std::size_t>& dims, double tol) {
            return ppt_to_dict(separability::is_ppt(to_density(rho, dims), tol));
        },
        py::arg("rho"), py::arg("dims"), py::arg("tol") = 1e-9);

    m.def(
        "validate_witness",
        [](const NpComplex& w, const std::vector<std::size_t>& dims, std::size_t samples,
           std::uint64_t seed, std::size_t attack_restarts) {
            const auto val = separability::validate_witness(to_matrix(w), Dims(dims), samples,
                                                            seed, attack_restarts);
            py::dict out;
            out["sample_min"] = val.sample_min;
            out["attack_min"] = val.attack_min;
            out["min"] = val.min();
            if (val.violating_sigma) out["violating_sigma"] = from_matrix(*val.violating_sigma);
            return out;
        },
        py::arg("w"), py::arg("dims"), py::arg("samples") = 20000, py::arg("seed") = 0,
        py::arg("attack_restarts") = 256);

    m.def(
        "analyze_json",
        [](const ProductStateSet& s, std::size_t restarts, std::uint64_t seed, bool oracle,
           std::size_t oracle_resolution, bool conservative, std::size_t witness_samples,
           std::size_t attack_restarts) {
            report::AnalysisOptions opt;
            opt.restarts = restarts;
            opt.seed = seed;
            opt.use_oracle = oracle;
            opt.oracle_resolution = oracle_resolution;
            opt.conservative = conservative;
            opt.witness_samples = witness_samples;
            opt.attack_restarts = attack_restarts;
            return report::to_json_string(report::run_analysis(s, opt));
        },
        py::arg("set"), py::arg("restarts") = 256, py::arg("seed") = 0,
        py::arg("oracle") = false, py::arg("oracle_resolution") = 0,
        py::arg("conservative") = false, py::arg("witness_samples") = 100000,
        py::arg("attack_restarts") = 256);

    m.def(
        "frustum_csv",
        [](const ProductStateSet& s, std::size_t steps, std::size_t restarts,
           std::uint64_t seed) {
            return report::frustum_csv(report::frustum_sweep(s, steps, restarts, seed));
        },
        py::arg("set"), py::arg("steps") = 100, py::arg("restarts") = 256, py::arg("seed") = 0);
}
