#include "sdnids/exp/scenario.hpp"

#include <fstream>

#include "sdnids/common/text.hpp"

namespace sdnids::exp {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw std::invalid_argument("config: " + field + ": " + why);
}

sim::AttackKind attack_kind_from(const std::string& s) {
    if (s == "none") return sim::AttackKind::None;
    if (s == "fdff") return sim::AttackKind::FDFF;
    if (s == "fni") return sim::AttackKind::FNI;
    bad("attack.kind", "expected none|fdff|fni, got '" + s + "'");
}

sim::TamperMode tamper_from(const std::string& s) {
    if (s == "metric") return sim::TamperMode::Metric;
    if (s == "node_id") return sim::TamperMode::NodeId;
    bad("attack.tamper_mode", "expected metric|node_id, got '" + s + "'");
}

DetectorSpec detector_from(const json& j, const std::string& field) {
    DetectorSpec d;
    if (!j.is_object()) bad(field, "expected an object");
    d.learning_window = j.value("m", d.learning_window);
    d.gamma = j.value("gamma", d.gamma);
    d.confidence = j.value("confidence", d.confidence);
    d.horizon = j.value("horizon", d.horizon);
    if (j.contains("lrv_bandwidth")) d.lrv_bandwidth = j.at("lrv_bandwidth").get<int>();
    try {
        d.params().validate();
    } catch (const std::invalid_argument& e) {
        bad(field, e.what());
    }
    return d;
}

json detector_to(const DetectorSpec& d) {
    json j{{"m", d.learning_window},
           {"gamma", d.gamma},
           {"confidence", d.confidence},
           {"horizon", d.horizon}};
    if (d.lrv_bandwidth) j["lrv_bandwidth"] = *d.lrv_bandwidth;
    return j;
}

}  // namespace

cpd::DetectorParams DetectorSpec::params() const {
    cpd::DetectorParams p;
    p.learning_window = learning_window;
    p.gamma = gamma;
    p.confidence = confidence;
    p.horizon = horizon;
    p.lrv_bandwidth = lrv_bandwidth;
    return p;
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
    ScenarioConfig c;
    c.name = j.value("name", c.name);

    if (j.contains("topology")) {
        const auto& t = j.at("topology");
        c.sim.side = t.value("side", c.sim.side);
        c.sim.spacing = t.value("spacing_m", c.sim.spacing);
        c.sim.radio_radius = t.value("radio_radius", c.sim.radio_radius);
    }
    if (j.contains("traffic")) {
        const auto& t = j.at("traffic");
        auto& tc = c.sim.traffic;
        tc.data_period_s = t.value("data_period_s", tc.data_period_s);
        tc.mgmt_period_s = t.value("mgmt_period_s", tc.mgmt_period_s);
        tc.report_period_s = t.value("report_period_s", tc.report_period_s);
        tc.payload_bytes = t.value("payload_bytes", tc.payload_bytes);
        tc.timer_jitter = t.value("timer_jitter", tc.timer_jitter);
        tc.link_metric_jitter = t.value("link_metric_jitter", tc.link_metric_jitter);
    }
    if (j.contains("costs")) {
        const auto& t = j.at("costs");
        auto& cm = c.sim.costs;
        cm.proc_per_packet_ms = t.value("proc_per_packet_ms", cm.proc_per_packet_ms);
        cm.tx_per_16_bytes_ms = t.value("tx_per_16_bytes_ms", cm.tx_per_16_bytes_ms);
        cm.hop_delay_ms = t.value("hop_delay_ms", cm.hop_delay_ms);
        cm.controller_service_ms = t.value("controller_service_ms", cm.controller_service_ms);
    }
    c.sim.duration_s = j.value("duration_s", c.sim.duration_s);
    c.sim.window_s = j.value("window_s", c.sim.window_s);
    c.sim.loss_prob = j.value("loss_prob", c.sim.loss_prob);
    c.sim.flow_table_capacity = j.value("flow_table_capacity", c.sim.flow_table_capacity);
    c.sim.ttl = j.value("ttl", c.sim.ttl);
    c.sim.report_change_threshold =
        j.value("report_change_threshold", c.sim.report_change_threshold);
    c.sim.request_min_interval_s =
        j.value("request_min_interval_s", c.sim.request_min_interval_s);
    c.sim.record_trace = j.value("record_trace", c.sim.record_trace);

    if (j.contains("attack")) {
        const auto& a = j.at("attack");
        auto& ac = c.sim.attack;
        ac.kind = attack_kind_from(a.value("kind", std::string("none")));
        ac.fraction = a.value("fraction", ac.fraction);
        if (a.contains("attackers")) ac.attackers = a.at("attackers").get<std::vector<int>>();
        ac.placement_seed = a.value("placement_seed", ac.placement_seed);
        ac.start_time_s = a.value("start_time_s", ac.start_time_s);
        ac.bogus_flow_period_s = a.value("bogus_flow_period_s", ac.bogus_flow_period_s);
        ac.tamper_mode = tamper_from(a.value("tamper_mode", std::string("node_id")));
    }

    if (j.contains("detectors")) {
        const auto& d = j.at("detectors");
        if (d.contains("overhead"))
            c.overhead_detector = detector_from(d.at("overhead"), "detectors.overhead");
        if (d.contains("delivery"))
            c.delivery_detector = detector_from(d.at("delivery"), "detectors.delivery");
        if (d.contains("distributed")) {
            c.distributed_detector =
                detector_from(d.at("distributed"), "detectors.distributed");
            if (d.at("distributed").contains("metric"))
                c.distributed_metric = sim::node_metric_from_name(
                    d.at("distributed").at("metric").get<std::string>());
        }
    }
    c.run_centralized = j.value("run_centralized", c.run_centralized);
    c.run_distributed = j.value("run_distributed", c.run_distributed);
    c.run_groups = j.value("run_groups", c.run_groups);
    c.exchange_depth = j.value("exchange_depth", c.exchange_depth);

    if (j.contains("weights")) {
        c.weights.clear();
        for (const auto& w : j.at("weights")) {
            if (!w.is_array() || w.size() != 2) bad("weights", "expected pairs [a, b]");
            c.weights.push_back({w[0].get<double>(), w[1].get<double>()});
        }
    }
    if (j.contains("calibration")) {
        const auto& k = j.at("calibration");
        c.calibration.n_paths = k.value("n_paths", c.calibration.n_paths);
        c.calibration.n_grid = k.value("n_grid", c.calibration.n_grid);
        c.calibration.seed = k.value("seed", c.calibration.seed);
        c.calibration.two_sided = k.value("two_sided", c.calibration.two_sided);
    }
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();

    c.validate();
    return c;
}

json ScenarioConfig::to_json() const {
    json j;
    j["name"] = name;
    j["topology"] = {{"side", sim.side},
                     {"spacing_m", sim.spacing},
                     {"radio_radius", sim.radio_radius}};
    j["traffic"] = {{"data_period_s", sim.traffic.data_period_s},
                    {"mgmt_period_s", sim.traffic.mgmt_period_s},
                    {"report_period_s", sim.traffic.report_period_s},
                    {"payload_bytes", sim.traffic.payload_bytes},
                    {"timer_jitter", sim.traffic.timer_jitter},
                    {"link_metric_jitter", sim.traffic.link_metric_jitter}};
    j["costs"] = {{"proc_per_packet_ms", sim.costs.proc_per_packet_ms},
                  {"tx_per_16_bytes_ms", sim.costs.tx_per_16_bytes_ms},
                  {"hop_delay_ms", sim.costs.hop_delay_ms},
                  {"controller_service_ms", sim.costs.controller_service_ms}};
    j["duration_s"] = sim.duration_s;
    j["window_s"] = sim.window_s;
    j["loss_prob"] = sim.loss_prob;
    j["flow_table_capacity"] = sim.flow_table_capacity;
    j["ttl"] = sim.ttl;
    j["report_change_threshold"] = sim.report_change_threshold;
    j["request_min_interval_s"] = sim.request_min_interval_s;
    j["record_trace"] = sim.record_trace;
    j["attack"] = {{"kind", sim::attack_kind_name(sim.attack.kind)},
                   {"fraction", sim.attack.fraction},
                   {"attackers", sim.attack.attackers},
                   {"placement_seed", sim.attack.placement_seed},
                   {"start_time_s", sim.attack.start_time_s},
                   {"bogus_flow_period_s", sim.attack.bogus_flow_period_s},
                   {"tamper_mode",
                    sim.attack.tamper_mode == sim::TamperMode::Metric ? "metric" : "node_id"}};
    j["detectors"] = {{"overhead", detector_to(overhead_detector)},
                      {"delivery", detector_to(delivery_detector)},
                      {"distributed", detector_to(distributed_detector)}};
    j["detectors"]["distributed"]["metric"] = sim::node_metric_name(distributed_metric);
    j["run_centralized"] = run_centralized;
    j["run_distributed"] = run_distributed;
    j["run_groups"] = run_groups;
    j["exchange_depth"] = exchange_depth;
    json ws = json::array();
    for (const auto& w : weights) ws.push_back({w.a, w.b});
    j["weights"] = ws;
    j["calibration"] = {{"n_paths", calibration.n_paths},
                        {"n_grid", calibration.n_grid},
                        {"seed", calibration.seed},
                        {"two_sided", calibration.two_sided}};
    j["seeds"] = seeds;
    return j;
}

void ScenarioConfig::validate() const {
    try {
        sim.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    for (const auto& spec : {overhead_detector, delivery_detector, distributed_detector})
        spec.params().validate();
    if (sim.attack.kind != sim::AttackKind::None) {
        const int onset = sim.attack_start_window();
        // The learning window must finish before the attack can start.
        for (const auto& [field, spec] :
             {std::pair{"detectors.overhead", overhead_detector},
              std::pair{"detectors.delivery", delivery_detector},
              std::pair{"detectors.distributed", distributed_detector}}) {
            if (spec.learning_window >= onset)
                bad(field, strprintf("m=%d must be < attack start sample %d",
                                     spec.learning_window, onset));
        }
    }
    for (const auto& w : weights)
        if (std::abs(w.a + w.b - 1.0) > 1e-9) bad("weights", "pairs must satisfy a + b = 1");
    if (exchange_depth < 1) bad("exchange_depth", "must be >= 1");
    if (calibration.n_paths < 1000) bad("calibration.n_paths", "must be >= 1000");
    if (calibration.n_grid < 100) bad("calibration.n_grid", "must be >= 100");
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string ScenarioConfig::digest() const {
    json j = to_json();
    j.erase("seeds");  // the seed list is batch input, not scenario identity
    return strprintf("%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
}

int ScenarioConfig::post_onset_samples() const {
    if (sim.attack.kind == sim::AttackKind::None) return sim.window_count();
    return sim.window_count() - sim.attack_start_window();
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config file: " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + file.string() + ": " + e.what());
    }
    return ScenarioConfig::from_json(j);
}

}  // namespace sdnids::exp
