#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "spanchain/aggregation.hpp"
#include "spanchain/harness.hpp"

namespace py = pybind11;
using namespace spanchain;

namespace {

py::dict outcome_to_dict(const SlotOutcome& o) {
  py::dict received;
  for (const auto& [v, decodes] : o.received) {
    py::list lst;
    for (const auto& [u, payload] : decodes) lst.append(py::make_tuple(u, payload));
    received[py::int_(v)] = lst;
  }
  py::dict sensed;
  for (const auto& [v, e] : o.sensed_energy) sensed[py::int_(v)] = e;
  py::dict out;
  out["received"] = received;
  out["sensed_energy"] = sensed;
  return out;
}

py::dict metrics_to_dict(const RunMetrics& r) {
  py::dict d;
  d["label"] = r.label;
  d["distribution"] = to_string(r.config.deployment.distribution);
  d["n"] = r.config.deployment.n;
  d["sigma"] = r.config.agg.sigma;
  d["mu"] = r.config.agg.mu;
  d["commits"] = r.commits();
  d["abandons"] = r.abandons();
  d["total_slots"] = r.total_slots();
  d["committed_txs"] = r.committed_txs();
  d["mean_epoch_slots"] = r.mean_epoch_slots();
  d["tps"] = r.tps();
  py::list trials;
  for (const TrialMetrics& t : r.trials) {
    py::dict td;
    td["seed"] = t.seed;
    td["epoch_slots"] = t.epoch_slots;
    td["commits"] = t.commits;
    td["abandons"] = t.abandons;
    td["committed_txs"] = t.committed_txs;
    td["total_slots"] = t.total_slots;
    td["tps"] = t.tps();
    td["gamma"] = t.gamma;
    td["spanner_levels"] = t.spanner_levels;
    trials.append(td);
  }
  d["trials"] = trials;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "slot-synchronous wireless blockchain simulator core";

  py::class_<DeploymentSpec>(m, "DeploymentSpec")
      .def(py::init<>())
      .def_readwrite("plane_w", &DeploymentSpec::plane_w)
      .def_readwrite("plane_h", &DeploymentSpec::plane_h)
      .def_readwrite("n", &DeploymentSpec::n)
      .def_readwrite("seed", &DeploymentSpec::seed)
      .def_readwrite("normal_sigma_frac", &DeploymentSpec::normal_sigma_frac)
      .def_readwrite("exp_mean_frac", &DeploymentSpec::exp_mean_frac)
      .def_property(
          "distribution",
          [](const DeploymentSpec& s) { return to_string(s.distribution); },
          [](DeploymentSpec& s, const std::string& v) {
            s.distribution = distribution_from_string(v);
          });

  py::class_<NodePlacement>(m, "NodePlacement")
      .def_static("generate", &NodePlacement::generate)
      .def_property_readonly("n", &NodePlacement::size)
      .def_property_readonly("gamma", &NodePlacement::gamma)
      .def_property_readonly("positions",
                             [](const NodePlacement& p) {
                               py::list out;
                               for (const Vec2& v : p.positions()) {
                                 out.append(py::make_tuple(v.x, v.y));
                               }
                               return out;
                             })
      .def("distance", &NodePlacement::distance)
      .def("neighbors_within", &NodePlacement::neighbors_within)
      .def("dumps",
           [](const NodePlacement& p) {
             std::ostringstream os;
             p.save(os);
             return os.str();
           })
      .def_static("loads", [](const std::string& text) {
        std::istringstream is(text);
        return NodePlacement::load(is);
      });

  py::class_<SinrParams>(m, "SinrParams")
      .def(py::init<>())
      .def_readwrite("alpha", &SinrParams::alpha)
      .def_readwrite("beta", &SinrParams::beta)
      .def_readwrite("noise", &SinrParams::noise);

  m.def("resolve_slot",
        [](const NodePlacement& p, const SinrParams& params,
           const std::vector<std::pair<NodeId, double>>& intents,
           const std::vector<NodeId>& listeners) {
          std::vector<TransmissionIntent> tx;
          for (std::size_t i = 0; i < intents.size(); ++i) {
            tx.push_back({intents[i].first, intents[i].second, i});
          }
          return outcome_to_dict(resolve_slot(p, params, tx, listeners));
        },
        py::arg("placement"), py::arg("params"), py::arg("intents"),
        py::arg("listeners"));
  m.def("transmit_power", &transmit_power);
  m.def("broadcast_power", &broadcast_power);

  py::class_<Spanner>(m, "Spanner")
      .def_property_readonly("levels", &Spanner::levels)
      .def_property_readonly("collector", &Spanner::collector)
      .def_property_readonly("top_level", &Spanner::top_level)
      .def_property_readonly("construction_slots", &Spanner::construction_slots)
      .def("member_level", &Spanner::member_level)
      .def("children", &Spanner::children)
      .def("parent",
           [](const Spanner& s, NodeId v) -> py::object {
             const auto* p = s.parentage(v);
             if (p == nullptr) return py::none();
             return py::make_tuple(p->parent, p->level);
           })
      .def("dumps", [](const Spanner& s) {
        std::ostringstream os;
        s.dump(os);
        return os.str();
      });

  m.def("build_spanner",
        [](const NodePlacement& p, const std::vector<NodeId>& alive,
           const std::string& mode, std::uint64_t seed, int c_span, double contend_p,
           const SinrParams& sinr) {
          SpannerConfig cfg;
          cfg.mode = spanner_mode_from_string(mode);
          cfg.c_span = c_span;
          cfg.contend_p = contend_p;
          return build_spanner(p, alive, cfg, sinr, seed);
        },
        py::arg("placement"), py::arg("alive"), py::arg("mode") = "oracle",
        py::arg("seed") = 0, py::arg("c_span") = 4, py::arg("contend_p") = 0.02,
        py::arg("sinr") = SinrParams{});
  m.def("density_check", &density_check);

  m.def("collect",
        [](const NodePlacement& p, const Spanner& s, const SinrParams& sinr,
           double sigma, bool certified, std::uint64_t seed,
           const std::map<NodeId, std::string>& payloads) {
          AggregationParams agg;
          agg.sigma = sigma;
          agg.certified = certified;
          agg = AggregationParams::resolved(agg, sinr);
          std::map<NodeId, std::vector<MessageData>> inputs;
          for (const auto& [v, text] : payloads) {
            inputs[v] = {MessageData::of_control(v, text)};
          }
          SlotClock clock(p.size(), nullptr);
          AggregationRun run = data_aggregation(p, s, sinr, agg, inputs, clock, seed);
          py::list collected;
          for (const Message& msg : run.collector_queue) {
            collected.append(py::make_tuple(msg.data.signer, msg.data.control));
          }
          py::dict out;
          out["collector_queue"] = collected;
          out["slots_used"] = run.slots_used;
          out["mu"] = agg.mu;
          return out;
        },
        py::arg("placement"), py::arg("spanner"), py::arg("sinr") = SinrParams{},
        py::arg("sigma") = 2.0, py::arg("certified") = false, py::arg("seed") = 0,
        py::arg("payloads") = std::map<NodeId, std::string>{});

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("from_file", &ExperimentConfig::from_file)
      .def("apply", &ExperimentConfig::apply)
      .def("validate", &ExperimentConfig::validate);

  m.def("run_experiment",
        [](const ExperimentConfig& cfg) { return metrics_to_dict(run_experiment(cfg)); });
  m.def("sweep",
        [](const ExperimentConfig& cfg, const std::string& axis,
           const std::vector<std::string>& values) {
          py::list out;
          for (const RunMetrics& r : sweep(cfg, axis_from_string(axis), values)) {
            out.append(metrics_to_dict(r));
          }
          return out;
        });
  m.def("emit_rows",
        [](const ExperimentConfig& cfg, const std::string& path,
           const std::string& format) {
          RunMetrics r = run_experiment(cfg);
          std::ofstream os(path);
          if (!os) throw std::runtime_error("cannot write " + path);
          emit({r}, os, format_from_string(format));
        });
}
