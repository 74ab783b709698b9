// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmbeam/channel.hpp"
#include "mmbeam/cli.hpp"
#include "mmbeam/codebook.hpp"
#include "mmbeam/errors.hpp"
#include "mmbeam/experiments.hpp"
#include "mmbeam/linalg.hpp"
#include "mmbeam/precoding.hpp"
#include "mmbeam/rng.hpp"
#include "mmbeam/search.hpp"

namespace py = pybind11;
using namespace mmbeam;

namespace {

py::array_t<std::complex<double>> matrix_to_array(const ComplexMatrix &m) {
    py::array_t<std::complex<double>> out({m.rows(), m.cols()});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            buf(i, j) = m(i, j);
    return out;
}

ComplexMatrix array_to_matrix(const py::array_t<std::complex<double>> &a) {
    if (a.ndim() != 2)
        throw py::value_error("expected a 2-d complex array");
    const auto buf = a.unchecked<2>();
    std::vector<cd> entries(static_cast<std::size_t>(a.shape(0) * a.shape(1)));
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j)
            entries[static_cast<std::size_t>(i * a.shape(1) + j)] = buf(i, j);
    return ComplexMatrix(static_cast<std::size_t>(a.shape(0)),
                         static_cast<std::size_t>(a.shape(1)), std::move(entries));
}

} // namespace

PYBIND11_MODULE(_mmbeam, m) {
    m.doc() = "mmWave hybrid beamforming: hierarchical multi-beam search and "
              "low-complexity hybrid precoding";
    m.attr("__version__") = kVersion;

    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<UnsupportedConfiguration>(m, "UnsupportedConfiguration",
                                                     PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
    py::register_exception<DegenerateCombiner>(m, "DegenerateCombiner", PyExc_RuntimeError);

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def_static("from_stream", &Rng::from_stream, py::arg("master_seed"), py::arg("a"),
                    py::arg("b") = 0, py::arg("c") = 0)
        .def("uniform", static_cast<double (Rng::*)()>(&Rng::uniform))
        .def("normal", &Rng::normal)
        .def("complex_normal", &Rng::complex_normal, py::arg("variance"));

    py::class_<PathComponent>(m, "PathComponent")
        .def_readonly("gain", &PathComponent::gain)
        .def_readonly("aod_cos", &PathComponent::aod_cos)
        .def_readonly("aoa_cos", &PathComponent::aoa_cos)
        .def_readonly("aod_phys", &PathComponent::aod_phys)
        .def_readonly("aoa_phys", &PathComponent::aoa_phys);
    m.def("make_path", &make_path, py::arg("gain"), py::arg("aod_phys"), py::arg("aoa_phys"));

    py::class_<ChannelRealization>(m, "ChannelRealization")
        .def_readonly("paths", &ChannelRealization::paths)
        .def_readonly("n_bs_antennas", &ChannelRealization::n_bs_antennas)
        .def_readonly("n_ms_antennas", &ChannelRealization::n_ms_antennas)
        .def_property_readonly(
            "matrix", [](const ChannelRealization &h) { return matrix_to_array(h.matrix); });

    m.def("steering_vector", &steering_vector, py::arg("n"), py::arg("omega"));
    m.def("generate_channel", &generate_channel, py::arg("n_a"), py::arg("m_a"), py::arg("l"),
          py::arg("rng"));
    m.def("channel_from_paths", &channel_from_paths, py::arg("paths"), py::arg("n_a"),
          py::arg("m_a"));
    m.def(
        "measure",
        [](const ChannelRealization &h, const std::vector<cd> &w_ms, const std::vector<cd> &w_bs,
           double power, Rng &rng, bool noiseless) {
            return measure(h, w_ms, w_bs, power, rng, noiseless);
        },
        py::arg("h"), py::arg("w_ms"), py::arg("w_bs"), py::arg("power"), py::arg("rng"),
        py::arg("noiseless"));

    py::class_<Codeword>(m, "Codeword")
        .def_readonly("weights", &Codeword::weights)
        .def_readonly("layer", &Codeword::layer)
        .def_readonly("position", &Codeword::position)
        .def_readonly("coverage_lo", &Codeword::coverage_lo)
        .def_readonly("coverage_hi", &Codeword::coverage_hi);

    py::class_<Codebook>(m, "Codebook")
        .def_readonly("n_antennas", &Codebook::n_antennas)
        .def_readonly("hierarchical_factor", &Codebook::hierarchical_factor)
        .def_readonly("oversample_factor", &Codebook::oversample_factor)
        .def_readonly("depth", &Codebook::depth)
        .def_readonly("layers", &Codebook::layers)
        .def_readonly("oversample_layer", &Codebook::oversample_layer)
        .def("at", &Codebook::at, py::arg("layer"), py::arg("position"),
             py::return_value_policy::reference_internal)
        .def("oversample_at", &Codebook::oversample_at, py::arg("index"),
             py::return_value_policy::reference_internal);

    m.def("build_codebook", &build_codebook, py::arg("n"), py::arg("m"),
          py::arg("k_oversample"));
    m.def("beam_gain", &beam_gain, py::arg("codeword"), py::arg("omega"));
    m.def("children", &children, py::arg("codebook"), py::arg("layer"), py::arg("position"));

    py::class_<BeamSearchResult>(m, "BeamSearchResult")
        .def_readonly("pairs", &BeamSearchResult::pairs)
        .def_readonly("gains", &BeamSearchResult::gains)
        .def_readonly("measurements_used", &BeamSearchResult::measurements_used)
        .def_readonly("duplicate_found", &BeamSearchResult::duplicate_found)
        .def_property_readonly("found_channel", [](const BeamSearchResult &r) {
            return matrix_to_array(r.found_channel);
        });

    m.def("sequential_search", &sequential_search, py::arg("h"), py::arg("k_oversample"),
          py::arg("n_s"), py::arg("power"), py::arg("rng"), py::arg("noiseless"));
    m.def(
        "subtracted_measure",
        [](const ChannelRealization &h, const std::vector<cd> &w_ms, const std::vector<cd> &w_bs,
           const py::array_t<std::complex<double>> &found, double power, Rng &rng,
           bool noiseless) {
            return subtracted_measure(h, w_ms, w_bs, array_to_matrix(found), power, rng,
                                      noiseless);
        },
        py::arg("h"), py::arg("w_ms"), py::arg("w_bs"), py::arg("found"), py::arg("power"),
        py::arg("rng"), py::arg("noiseless"));
    m.def(
        "hierarchical_search",
        [](const ChannelRealization &h, const Codebook &cb_bs, const Codebook &cb_ms,
           std::size_t n_s, int i_ly, double power, Rng &rng, bool noiseless) {
            return hierarchical_search(h, cb_bs, cb_ms, n_s, i_ly, power, rng, noiseless);
        },
        py::arg("h"), py::arg("cb_bs"), py::arg("cb_ms"), py::arg("n_s"), py::arg("i_ly"),
        py::arg("power"), py::arg("rng"), py::arg("noiseless"));

    py::class_<PrecodingSolution>(m, "PrecodingSolution")
        .def_property_readonly("f_r",
                               [](const PrecodingSolution &s) { return matrix_to_array(s.f_r); })
        .def_property_readonly("w_r",
                               [](const PrecodingSolution &s) { return matrix_to_array(s.w_r); })
        .def_property_readonly("f_b",
                               [](const PrecodingSolution &s) { return matrix_to_array(s.f_b); })
        .def_property_readonly("w_b",
                               [](const PrecodingSolution &s) { return matrix_to_array(s.w_b); })
        .def_readonly("q", &PrecodingSolution::q);

    m.def("analog_precoders",
          [](const BeamSearchResult &r, const Codebook &cb_bs, const Codebook &cb_ms) {
              auto [f_r, w_r] = analog_precoders(r, cb_bs, cb_ms);
              return py::make_tuple(matrix_to_array(f_r), matrix_to_array(w_r));
          });
    m.def(
        "baseband_channel",
        [](const ChannelRealization &h, const py::array_t<std::complex<double>> &f_r,
           const py::array_t<std::complex<double>> &w_r, double training_snr, Rng &rng,
           bool noiseless) {
            return matrix_to_array(baseband_channel(h, array_to_matrix(f_r),
                                                    array_to_matrix(w_r), training_snr, rng,
                                                    noiseless));
        },
        py::arg("h"), py::arg("f_r"), py::arg("w_r"), py::arg("training_snr"), py::arg("rng"),
        py::arg("noiseless"));
    m.def(
        "digital_precoders",
        [](const py::array_t<std::complex<double>> &h_b,
           const py::array_t<std::complex<double>> &w_r, double power) {
            const DigitalPrecoding d =
                digital_precoders(array_to_matrix(h_b), array_to_matrix(w_r), power);
            return py::make_tuple(matrix_to_array(d.w_b), matrix_to_array(d.f_b), d.q,
                                  d.effective_gains);
        },
        py::arg("h_b"), py::arg("w_r"), py::arg("power"));
    m.def("waterfill", &waterfill, py::arg("gains"), py::arg("total_power"));
    m.def("build_precoding_solution", &build_precoding_solution, py::arg("h"), py::arg("result"),
          py::arg("cb_bs"), py::arg("cb_ms"), py::arg("power"), py::arg("training_snr"),
          py::arg("rng"), py::arg("noiseless_estimation"));
    m.def("achievable_rate", &achievable_rate, py::arg("h"), py::arg("solution"),
          py::arg("power"));
    m.def("rate_bound", &rate_bound, py::arg("h"), py::arg("n_s"), py::arg("power"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("n_a", &SimConfig::n_a)
        .def_readwrite("m_a", &SimConfig::m_a)
        .def_readwrite("n_r", &SimConfig::n_r)
        .def_readwrite("m_r", &SimConfig::m_r)
        .def_readwrite("n_s", &SimConfig::n_s)
        .def_readwrite("l", &SimConfig::l)
        .def_readwrite("m", &SimConfig::m)
        .def_readwrite("k", &SimConfig::k)
        .def_readwrite("i_ly", &SimConfig::i_ly)
        .def_readwrite("snr_db_grid", &SimConfig::snr_db_grid)
        .def_readwrite("trials", &SimConfig::trials)
        .def_readwrite("master_seed", &SimConfig::master_seed)
        .def_readwrite("noiseless_estimation", &SimConfig::noiseless_estimation)
        .def_readwrite("training_snr_db", &SimConfig::training_snr_db);

    m.def("validate", &validate, py::arg("config"));
    m.def("success_decision", &success_decision, py::arg("result"), py::arg("truth"),
          py::arg("k_oversample"), py::arg("n_s"));
    m.def("time_cost_hierarchical", &time_cost_hierarchical, py::arg("config"));
    m.def("time_cost_sequential", &time_cost_sequential, py::arg("config"));
    m.def("time_cost_sparse", &time_cost_sparse, py::arg("config"));

    py::class_<SuccessRow>(m, "SuccessRow")
        .def_readonly("snr_db", &SuccessRow::snr_db)
        .def_readonly("n_s", &SuccessRow::n_s)
        .def_readonly("k", &SuccessRow::k)
        .def_readonly("i_ly", &SuccessRow::i_ly)
        .def_readonly("success_rate", &SuccessRow::success_rate)
        .def_readonly("ci95_halfwidth", &SuccessRow::ci95_halfwidth)
        .def_readonly("trials", &SuccessRow::trials);
    py::class_<RateRow>(m, "RateRow")
        .def_readonly("snr_db", &RateRow::snr_db)
        .def_readonly("n_s", &RateRow::n_s)
        .def_readonly("k", &RateRow::k)
        .def_readonly("i_ly", &RateRow::i_ly)
        .def_readonly("rate_lc_hpc_mean", &RateRow::rate_lc_hpc_mean)
        .def_readonly("rate_lc_hpc_ci95", &RateRow::rate_lc_hpc_ci95)
        .def_readonly("rate_bound_mean", &RateRow::rate_bound_mean)
        .def_readonly("rate_bound_ci95", &RateRow::rate_bound_ci95)
        .def_readonly("trials", &RateRow::trials);

    m.def("run_success_sweep", &run_success_sweep, py::arg("config"), py::arg("threads") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("run_rate_sweep", &run_rate_sweep, py::arg("config"), py::arg("threads") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("success_csv", &success_csv, py::arg("rows"));
    m.def("rate_csv", &rate_csv, py::arg("rows"));
}
