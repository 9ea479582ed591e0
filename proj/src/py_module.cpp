#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rsloc/harness.hpp"

namespace py = pybind11;
using namespace rsloc;

namespace {

SyncModel sync_from_string(const std::string& mode) {
  if (mode == "cp") return SyncModel::Coherent;
  if (mode == "ncp") return SyncModel::NonCoherent;
  throw ConfigError("mode must be 'cp' or 'ncp'");
}

Mode mode_from_string(const std::string& mode) {
  if (mode == "cp") return Mode::Cp;
  if (mode == "ncp") return Mode::Ncp;
  throw ConfigError("mode must be 'cp' or 'ncp'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radio-stripe uplink positioning: simulation, ML estimation and "
            "error bounds";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "NumericalError");

  py::class_<StripePose>(m, "StripePose")
      .def(py::init<>())
      .def_readwrite("position", &StripePose::position)
      .def_readwrite("orientation", &StripePose::orientation)
      .def_readwrite("antenna_count", &StripePose::antenna_count)
      .def_readwrite("element_spacing", &StripePose::element_spacing);

  py::class_<UeState>(m, "UeState")
      .def(py::init<>())
      .def_readwrite("position", &UeState::position)
      .def_readwrite("clock_offset", &UeState::clock_offset)
      .def_readwrite("phase_offset", &UeState::phase_offset);

  py::class_<OfdmConfig>(m, "OfdmConfig")
      .def(py::init<>())
      .def_readwrite("carrier_freq", &OfdmConfig::carrier_freq)
      .def_readwrite("bandwidth", &OfdmConfig::bandwidth)
      .def_readwrite("subcarrier_count", &OfdmConfig::subcarrier_count)
      .def_readwrite("pilots", &OfdmConfig::pilots)
      .def("subcarrier_spacing", &OfdmConfig::subcarrier_spacing)
      .def("wavelength", &OfdmConfig::wavelength);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("stripes", &ScenarioConfig::stripes)
      .def_readwrite("ue", &ScenarioConfig::ue)
      .def_readwrite("ofdm", &ScenarioConfig::ofdm)
      .def_readwrite("transmit_power", &ScenarioConfig::transmit_power)
      .def_readwrite("dnr_db", &ScenarioConfig::dnr_db)
      .def_readwrite("dmc_enabled", &ScenarioConfig::dmc_enabled)
      .def_readwrite("dmc_decay_distance", &ScenarioConfig::dmc_decay_distance)
      .def_readwrite("dmc_onset_excess", &ScenarioConfig::dmc_onset_excess)
      .def_readwrite("noise_temperature", &ScenarioConfig::noise_temperature)
      .def_readwrite("noiseless", &ScenarioConfig::noiseless)
      .def_readwrite("seed", &ScenarioConfig::seed);

  m.def("default_scenario", &default_scenario);
  m.def("load_config", &load_config, py::arg("path"));
  m.def("noise_power", &noise_power, py::arg("scenario"));
  m.def("average_sdnr", &average_sdnr, py::arg("scenario"));
  m.def("solve_power_for_sdnr", &solve_power_for_sdnr, py::arg("scenario"),
        py::arg("target_db"));

  m.def(
      "bounds",
      [](const ScenarioConfig& sc, const std::string& mode) {
        const BoundsResult b = evaluate_bounds(sc, sync_from_string(mode));
        py::dict out;
        out["peb_m"] = b.peb;
        out["ceb_s"] = b.ceb;
        out["fim"] = b.fim;
        out["efim"] = Eigen::MatrixXd(b.efim);
        return out;
      },
      py::arg("scenario"), py::arg("mode"),
      "PEB/CEB and the underlying (E)FIM for one scenario");

  m.def(
      "synthesize",
      [](const ScenarioConfig& sc, std::uint64_t seed) {
        const ObservationSet obs = synthesize_observations(sc, seed);
        py::list out;
        for (const MatrixXcd& y : obs.per_stripe) out.append(y);
        return out;
      },
      py::arg("scenario"), py::arg("seed"),
      "One observation draw, a list of M x K complex matrices");

  m.def(
      "estimate",
      [](const ScenarioConfig& sc, std::uint64_t seed,
         const std::string& mode) {
        const ObservationSet obs = synthesize_observations(sc, seed);
        const PipelineResult res = estimate(
            obs, sc, disturbance_models(sc), mode_from_string(mode));
        py::dict out;
        out["ils_position"] = Eigen::Vector2d(res.ils.position_2d);
        out["ils_clock_offset"] = res.ils.clock_offset;
        const EstimationResult& fin = res.cp ? *res.cp : res.ncp;
        out["position"] = Eigen::Vector2d(fin.position_2d);
        out["clock_offset"] = fin.clock_offset;
        out["cost"] = fin.final_cost;
        out["converged"] = fin.converged;
        out["init_failed"] = fin.init_failed;
        if (fin.phase_offset) out["phase_offset_mod_pi"] = fin.phase_offset->value;
        out["gains"] = Eigen::VectorXd(fin.gains);
        return out;
      },
      py::arg("scenario"), py::arg("seed"), py::arg("mode"),
      "Synthesize one observation set and run the full estimation pipeline");

  m.def(
      "ml_costs",
      [](const ScenarioConfig& sc, std::uint64_t seed, double x, double y,
         double dtau) {
        const ObservationSet obs = synthesize_observations(sc, seed);
        const auto models = disturbance_models(sc);
        const WhitenedData data = whiten(obs, models);
        EstimationContext ctx(sc, data, models);
        const Vector2d p2d(x, y);
        return py::make_tuple(ctx.cost_cp(p2d, dtau), ctx.cost_ncp(p2d, dtau));
      },
      py::arg("scenario"), py::arg("seed"), py::arg("x"), py::arg("y"),
      py::arg("dtau"),
      "(CP, NCP) compressed ML costs at one candidate point");

  m.def(
      "monte_carlo",
      [](const ScenarioConfig& sc, const std::string& mode, int trials) {
        const MonteCarloResult mc =
            run_monte_carlo(sc, mode_from_string(mode), trials);
        py::dict out;
        out["rmse_position_m"] = mc.rmse_position;
        out["rmse_clock_s"] = mc.rmse_clock;
        out["rmse_position_ils_m"] = mc.rmse_position_ils;
        out["rmse_clock_ils_s"] = mc.rmse_clock_ils;
        out["failures"] = mc.failures;
        return out;
      },
      py::arg("scenario"), py::arg("mode"), py::arg("trials"));
}
