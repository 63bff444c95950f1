#include "sdnids/exp/runner.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <fstream>
#include <thread>

#include "sdnids/common/text.hpp"

namespace sdnids::exp {

namespace {

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const int n_threads =
        std::max(1, std::min<int>(jobs > 0 ? jobs : static_cast<int>(hw ? hw : 1),
                                  static_cast<int>(count)));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

json counters_json(const sim::TraceCounters& c) {
    auto cls = [](const sim::ClassCounters& cc) {
        return json{{"originated", cc.originated},
                    {"consumed", cc.consumed},
                    {"dropped_loss", cc.drops.loss},
                    {"dropped_ttl", cc.drops.ttl},
                    {"dropped_no_rule", cc.drops.no_rule},
                    {"dropped_rule", cc.drops.rule_drop},
                    {"dropped_broken_link", cc.drops.broken_link},
                    {"in_flight", cc.in_flight()}};
    };
    return json{{"benign_data", cls(c.benign_data)},
                {"bogus_data", cls(c.bogus_data)},
                {"management", cls(c.management)},
                {"control", cls(c.control)},
                {"transmissions", c.transmissions},
                {"receptions", c.receptions},
                {"tampered_reports", c.tampered_reports},
                {"controller_recomputes", c.controller_recomputes},
                {"setups_pushed", c.setups_pushed},
                {"unroutable_replies", c.unroutable_replies},
                {"suppressed_requests", c.suppressed_requests}};
}

}  // namespace

ScenarioRuntime ScenarioRuntime::prepare(const ScenarioConfig& cfg,
                                         cpd::CriticalValueCache& cache) {
    cfg.validate();
    ScenarioRuntime rt;
    rt.config = cfg;
    rt.overhead_cv = cache.get_or_compute(cfg.overhead_detector.gamma,
                                          cfg.overhead_detector.confidence, cfg.calibration);
    rt.delivery_cv = cache.get_or_compute(cfg.delivery_detector.gamma,
                                          cfg.delivery_detector.confidence, cfg.calibration);
    rt.distributed_cv =
        cache.get_or_compute(cfg.distributed_detector.gamma, cfg.distributed_detector.confidence,
                             cfg.calibration);
    rt.group_of =
        pipeline::grid_groups(cfg.sim.side, pipeline::default_blocks_per_axis(cfg.sim.side));
    return rt;
}

RunArtifacts execute_run(const ScenarioRuntime& rt, std::uint64_t seed) {
    const auto& cfg = rt.config;
    auto out = sim::run(cfg.sim, seed);

    RunArtifacts a;
    a.seed = seed;
    a.truth = cfg.sim.attack.kind;
    a.attack_window = out.attack_start_window;
    a.attackers = out.attackers;
    a.counters = out.counters;
    a.series = std::move(out.series);

    if (cfg.run_centralized) {
        pipeline::CentralizedDetector det(
            cpd::Detector(cfg.overhead_detector.params(), rt.overhead_cv),
            cpd::Detector(cfg.delivery_detector.params(), rt.delivery_cv));
        a.label = pipeline::classify_series(det, a.series);
        if (a.label.trigger_window && a.attack_window >= 0 &&
            *a.label.trigger_window >= a.attack_window) {
            a.detected = true;
            a.delay = *a.label.trigger_window - a.attack_window;
        }
    }

    if (cfg.run_distributed) {
        const auto dep = pipeline::run_distributed(
            cfg.distributed_metric, a.series, cfg.distributed_detector.params(),
            rt.distributed_cv);
        a.alarms = dep.alarms();
        a.excluded_nodes = dep.excluded();

        std::vector<ident::Alarm> alarms;
        for (const auto& al : a.alarms)
            if (a.attack_window < 0 || al.window >= a.attack_window)
                alarms.push_back({al.node, al.window});
        a.id_v1 = ident::identify_v1(alarms, out.topology.neighbors);
        const auto view =
            ident::ExchangeView::from_series(alarms, out.exchanges, cfg.exchange_depth);
        a.id_v2 = ident::identify_v2(alarms, view, out.topology.neighbors);
    }

    if (cfg.run_groups) {
        const auto agg =
            pipeline::aggregate_group_series(a.series, cfg.distributed_metric, rt.group_of);
        a.groups = pipeline::run_groups(agg, cfg.distributed_detector.params(),
                                        rt.distributed_cv);
        std::vector<ident::GroupAlarm> galarms;
        for (const auto& g : a.groups)
            if (g.alarmed && (a.attack_window < 0 || g.window >= a.attack_window))
                galarms.push_back({g.group, g.window});
        a.region = ident::region_localize(galarms, std::max(0, a.attack_window),
                                          cfg.post_onset_samples(), a.series.node_count);
    }
    return a;
}

std::string alarms_csv(const RunArtifacts& a) {
    std::string out = "window,node,metric,stat,threshold\n";
    if (a.label.trigger_window) {
        out += strprintf("%d,-1,%s,,\n", *a.label.trigger_window,
                         pipeline::net_metric_name(*a.label.triggered_metric));
    }
    auto sorted = a.alarms;
    std::sort(sorted.begin(), sorted.end(),
              [](const pipeline::AlarmEvent& x, const pipeline::AlarmEvent& y) {
                  if (x.window != y.window) return x.window < y.window;
                  return x.node < y.node;
              });
    for (const auto& al : sorted)
        out += strprintf("%d,%d,%s,%s,%s\n", al.window, al.node,
                         sim::node_metric_name(al.metric), fixed_text(al.statistic, 4).c_str(),
                         fixed_text(al.threshold, 4).c_str());
    return out;
}

std::string declarations_csv(const RunArtifacts& a, const ident::TallyResult& result,
                             const sim::Topology& topo) {
    std::vector<sim::NodeId> rows;
    for (const auto& [node, votes] : result.tally) rows.push_back(node);
    for (sim::NodeId at : a.attackers)
        if (!result.tally.count(at)) rows.push_back(at);
    std::sort(rows.begin(), rows.end());

    std::string out = "node,declared,true_attacker,tally,degree\n";
    for (sim::NodeId node : rows) {
        const bool declared = std::binary_search(result.declared.begin(), result.declared.end(), node);
        const bool truth = std::binary_search(a.attackers.begin(), a.attackers.end(), node);
        const auto it = result.tally.find(node);
        out += strprintf("%d,%d,%d,%d,%zu\n", node, declared ? 1 : 0, truth ? 1 : 0,
                         it == result.tally.end() ? 0 : it->second,
                         topo.neighbors[static_cast<std::size_t>(node)].size());
    }
    return out;
}

json run_report_json(const RunArtifacts& a) {
    json j;
    j["seed"] = a.seed;
    j["truth"] = sim::attack_kind_name(a.truth);
    j["attack_window"] = a.attack_window;
    j["attackers"] = a.attackers;
    j["label"] = pipeline::attack_class_name(a.label.label);
    if (a.label.trigger_window) {
        j["trigger_window"] = *a.label.trigger_window;
        j["triggered_metric"] = pipeline::net_metric_name(*a.label.triggered_metric);
    }
    j["detected"] = a.detected;
    if (a.delay) j["delay"] = *a.delay;
    json alarms = json::array();
    for (const auto& al : a.alarms)
        alarms.push_back({{"node", al.node},
                          {"window", al.window},
                          {"metric", sim::node_metric_name(al.metric)}});
    j["alarms"] = alarms;
    j["excluded_nodes"] = a.excluded_nodes;
    j["declared_v1"] = a.id_v1.declared;
    j["declared_v2"] = a.id_v2.declared;
    j["abstained_v2"] = a.id_v2.abstained;
    json groups = json::array();
    for (const auto& g : a.groups)
        groups.push_back({{"group", g.group},
                          {"alarmed", g.alarmed},
                          {"window", g.window},
                          {"excluded", g.excluded}});
    j["groups"] = groups;
    json ranked = json::array();
    for (const auto& r : a.region.ranked)
        ranked.push_back({{"group", r.group},
                          {"stop_window", r.stop_window},
                          {"one_minus_s", r.one_minus_s}});
    j["region"] = {{"ranked", ranked},
                   {"heuristic", a.region.heuristic},
                   {"scale_warning", a.region.scale_warning}};
    j["counters"] = counters_json(a.counters);
    return j;
}

std::vector<RunRecord> run_experiment(const ScenarioConfig& cfg,
                                      const std::filesystem::path& out_dir, int jobs,
                                      cpd::CriticalValueCache& cache) {
    if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds: none given");
    const auto rt = ScenarioRuntime::prepare(cfg, cache);
    const auto topo = sim::build_grid(cfg.sim.side, cfg.sim.spacing, cfg.sim.radio_radius);

    const std::string digest = cfg.digest();
    const auto base = out_dir / digest;
    std::filesystem::create_directories(base);
    write_file(base / "scenario.json", cfg.to_json().dump(2) + "\n");

    std::vector<RunRecord> records(cfg.seeds.size());
    std::vector<std::string> errors(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), jobs, [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        auto& rec = records[i];
        rec.seed = seed;
        rec.digest = digest;
        rec.dir = base / std::to_string(seed);
        try {
            rec.artifacts = execute_run(rt, seed);
            std::filesystem::create_directories(rec.dir);
            write_file(rec.dir / "metrics.csv", rec.artifacts.series.to_csv());
            write_file(rec.dir / "alarms.csv", alarms_csv(rec.artifacts));
            write_file(rec.dir / "declarations.csv",
                       declarations_csv(rec.artifacts, rec.artifacts.id_v2, topo));
            write_file(rec.dir / "declarations_v1.csv",
                       declarations_csv(rec.artifacts, rec.artifacts.id_v1, topo));
            write_file(rec.dir / "report.json", run_report_json(rec.artifacts).dump(2) + "\n");
        } catch (const std::exception& e) {
            errors[i] = e.what();  // isolate the failure to this seed
        }
    });
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!errors[i].empty())
            write_file(base / (std::to_string(cfg.seeds[i]) + ".error.txt"), errors[i] + "\n");
    return records;
}

json write_batch_report(const ScenarioConfig& cfg, std::span<const RunRecord> records,
                        const std::filesystem::path& out_dir) {
    const auto base = out_dir / cfg.digest();
    std::filesystem::create_directories(base);
    const int n = cfg.sim.side * cfg.sim.side;
    const int onset = cfg.sim.attack_start_window();
    const std::size_t runs = records.size();

    // Classification counts.
    long fdff = 0, fni = 0, none = 0;
    for (const auto& r : records) {
        switch (r.artifacts.label.label) {
            case pipeline::AttackClass::FDFF: ++fdff; break;
            case pipeline::AttackClass::FNI: ++fni; break;
            case pipeline::AttackClass::NoAttack: ++none; break;
        }
    }
    double classification_prob = 0.0;
    if (runs > 0) {
        if (cfg.sim.attack.kind == sim::AttackKind::FDFF)
            classification_prob = static_cast<double>(fdff) / static_cast<double>(runs);
        else if (cfg.sim.attack.kind == sim::AttackKind::FNI)
            classification_prob = static_cast<double>(fni) / static_cast<double>(runs);
        else
            classification_prob = static_cast<double>(none) / static_cast<double>(runs);
    }
    write_file(base / "classification.csv",
               strprintf("scenario,truth,runs,labeled_fdff,labeled_fni,unlabeled,"
                         "classification_prob\n%s,%s,%zu,%ld,%ld,%ld,%s\n",
                         cfg.name.c_str(), sim::attack_kind_name(cfg.sim.attack.kind), runs,
                         fdff, fni, none, fixed_text(classification_prob, 4).c_str()));

    // Centralized performance per weight pair.
    std::vector<pipeline::RunResult> results;
    for (const auto& r : records) results.push_back({r.artifacts.detected, r.artifacts.delay});
    std::string perf = "weight_a,weight_b,dr,dtm,s,one_minus_s,p_ds\n";
    pipeline::PerformanceReport rep;
    if (!results.empty()) {
        rep = pipeline::score(results, cfg.post_onset_samples(), cfg.weights);
        for (const auto& [w, pds] : rep.p_ds)
            perf += strprintf("%s,%s,%s,%s,%s,%s,%s\n", fixed_text(w.a, 2).c_str(),
                              fixed_text(w.b, 2).c_str(), fixed_text(rep.dr, 4).c_str(),
                              fixed_text(rep.dtm, 2).c_str(), fixed_text(rep.s, 4).c_str(),
                              fixed_text(1.0 - rep.s, 4).c_str(), fixed_text(pds, 4).c_str());
    }
    write_file(base / "performance.csv", perf);

    // Per-node detection probabilities (post-onset alarms only).
    std::vector<long> alarm_count(static_cast<std::size_t>(n), 0);
    for (const auto& r : records)
        for (const auto& al : r.artifacts.alarms)
            if (onset < 0 || al.window >= onset)
                ++alarm_count[static_cast<std::size_t>(al.node)];
    std::vector<bool> is_attacker(static_cast<std::size_t>(n), false);
    for (const auto& r : records)
        for (sim::NodeId at : r.artifacts.attackers) is_attacker[static_cast<std::size_t>(at)] = true;
    std::string nodes = "node,row,col,alarms,runs,detection_probability,is_attacker\n";
    for (int node = 0; node < n; ++node) {
        const double p = runs == 0 ? 0.0
                                   : static_cast<double>(alarm_count[static_cast<std::size_t>(node)]) /
                                         static_cast<double>(runs);
        nodes += strprintf("%d,%d,%d,%ld,%zu,%s,%d\n", node, node / cfg.sim.side,
                           node % cfg.sim.side, alarm_count[static_cast<std::size_t>(node)], runs,
                           fixed_text(p, 4).c_str(),
                           is_attacker[static_cast<std::size_t>(node)] ? 1 : 0);
    }
    write_file(base / "node_detection.csv", nodes);

    // Identification probabilities for both algorithm versions.
    std::string ident_csv = "alg,node,declared_count,runs,probability,true_attacker\n";
    long v2_misid = 0, v1_misid = 0;
    json per_attacker = json::object();
    for (const char* alg : {"v1", "v2"}) {
        std::vector<long> declared(static_cast<std::size_t>(n), 0);
        for (const auto& r : records) {
            const auto& res = alg == std::string("v1") ? r.artifacts.id_v1 : r.artifacts.id_v2;
            for (sim::NodeId d : res.declared) {
                ++declared[static_cast<std::size_t>(d)];
                if (!is_attacker[static_cast<std::size_t>(d)]) {
                    if (alg == std::string("v1"))
                        ++v1_misid;
                    else
                        ++v2_misid;
                }
            }
        }
        for (int node = 0; node < n; ++node) {
            if (declared[static_cast<std::size_t>(node)] == 0 &&
                !is_attacker[static_cast<std::size_t>(node)])
                continue;
            const double p = runs == 0 ? 0.0
                                       : static_cast<double>(declared[static_cast<std::size_t>(node)]) /
                                             static_cast<double>(runs);
            ident_csv += strprintf("%s,%d,%ld,%zu,%s,%d\n", alg, node,
                                   declared[static_cast<std::size_t>(node)], runs,
                                   fixed_text(p, 4).c_str(),
                                   is_attacker[static_cast<std::size_t>(node)] ? 1 : 0);
            if (alg == std::string("v2") && is_attacker[static_cast<std::size_t>(node)])
                per_attacker[std::to_string(node)] = p;
        }
    }
    write_file(base / "identification.csv", ident_csv);

    // Group results.
    std::map<int, std::pair<long, long>> group_hits;  // group -> (alarms, windows sum)
    for (const auto& r : records)
        for (const auto& g : r.artifacts.groups)
            if (g.alarmed && (onset < 0 || g.window >= onset)) {
                group_hits[g.group].first += 1;
                group_hits[g.group].second += g.window;
            }
    std::string groups_csv = "group,alarms,runs,detection_probability,mean_stop_window\n";
    const int n_groups = records.empty() ? 0 : static_cast<int>(records[0].artifacts.groups.size());
    for (int g = 0; g < n_groups; ++g) {
        const auto it = group_hits.find(g);
        const long hits = it == group_hits.end() ? 0 : it->second.first;
        const double mean_stop =
            hits == 0 ? -1.0 : static_cast<double>(it->second.second) / static_cast<double>(hits);
        groups_csv += strprintf("%d,%ld,%zu,%s,%s\n", g, hits, runs,
                                fixed_text(runs == 0 ? 0.0 : static_cast<double>(hits) / runs, 4)
                                    .c_str(),
                                fixed_text(mean_stop, 2).c_str());
    }
    write_file(base / "groups.csv", groups_csv);

    json summary;
    summary["digest"] = cfg.digest();
    summary["name"] = cfg.name;
    summary["truth"] = sim::attack_kind_name(cfg.sim.attack.kind);
    summary["runs"] = runs;
    summary["classification_probability"] = classification_prob;
    summary["dr"] = rep.dr;
    summary["dtm"] = rep.dtm;
    summary["s"] = rep.s;
    summary["dtm_defined"] = rep.dtm_defined;
    summary["identification_v2_per_attacker"] = per_attacker;
    summary["misidentifications_v1"] = v1_misid;
    summary["misidentifications_v2"] = v2_misid;
    write_file(base / "summary.json", summary.dump(2) + "\n");
    return summary;
}

RunArtifacts artifacts_from_json(const json& j) {
    RunArtifacts a;
    a.seed = j.at("seed").get<std::uint64_t>();
    const auto truth = j.at("truth").get<std::string>();
    a.truth = truth == "fdff" ? sim::AttackKind::FDFF
                              : (truth == "fni" ? sim::AttackKind::FNI : sim::AttackKind::None);
    a.attack_window = j.at("attack_window").get<int>();
    a.attackers = j.at("attackers").get<std::vector<int>>();
    const auto label = j.at("label").get<std::string>();
    a.label.label = label == "fdff" ? pipeline::AttackClass::FDFF
                                    : (label == "fni" ? pipeline::AttackClass::FNI
                                                      : pipeline::AttackClass::NoAttack);
    if (j.contains("trigger_window")) {
        a.label.trigger_window = j.at("trigger_window").get<int>();
        a.label.triggered_metric = j.at("triggered_metric").get<std::string>() == "ctrl_overhead"
                                       ? pipeline::NetMetric::CtrlOverhead
                                       : pipeline::NetMetric::DeliveryRate;
    }
    a.detected = j.value("detected", false);
    if (j.contains("delay")) a.delay = j.at("delay").get<int>();
    for (const auto& al : j.at("alarms"))
        a.alarms.push_back({al.at("node").get<int>(), al.at("window").get<int>(),
                            sim::node_metric_from_name(al.at("metric").get<std::string>()), 0.0,
                            0.0});
    a.excluded_nodes = j.value("excluded_nodes", std::vector<int>{});
    a.id_v1.declared = j.value("declared_v1", std::vector<int>{});
    a.id_v2.declared = j.value("declared_v2", std::vector<int>{});
    a.id_v2.abstained = j.value("abstained_v2", std::vector<int>{});
    if (j.contains("groups"))
        for (const auto& g : j.at("groups"))
            a.groups.push_back({g.at("group").get<int>(), g.at("alarmed").get<bool>(),
                                g.at("window").get<int>(), 0.0, 0.0,
                                g.at("excluded").get<bool>()});
    return a;
}

std::vector<RunRecord> load_batch(const ScenarioConfig& cfg,
                                  const std::filesystem::path& out_dir) {
    const std::string digest = cfg.digest();
    const auto base = out_dir / digest;
    std::vector<RunRecord> records;
    if (!std::filesystem::exists(base)) return records;
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(base))
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "report.json"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        std::ifstream in(dir / "report.json");
        RunRecord rec;
        rec.digest = digest;
        rec.dir = dir;
        rec.artifacts = artifacts_from_json(json::parse(in));
        rec.seed = rec.artifacts.seed;
        records.push_back(std::move(rec));
    }
    return records;
}

SweepConfig SweepConfig::from_json(const json& j) {
    SweepConfig s;
    if (!j.contains("fdff") || !j.contains("fni"))
        throw std::invalid_argument("config: sweep needs 'fdff' and 'fni' scenario blocks");
    s.fdff = ScenarioConfig::from_json(j.at("fdff"));
    s.fni = ScenarioConfig::from_json(j.at("fni"));
    if (s.fdff.sim.attack.kind != sim::AttackKind::FDFF)
        throw std::invalid_argument("config: fdff.attack.kind: must be fdff");
    if (s.fni.sim.attack.kind != sim::AttackKind::FNI)
        throw std::invalid_argument("config: fni.attack.kind: must be fni");
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("m")) s.m_set = g.at("m").get<std::vector<int>>();
        if (g.contains("gamma")) s.gamma_set = g.at("gamma").get<std::vector<double>>();
        if (g.contains("confidence"))
            s.confidence_set = g.at("confidence").get<std::vector<double>>();
    }
    if (j.contains("weights")) {
        s.weights.clear();
        for (const auto& w : j.at("weights")) s.weights.push_back({w[0], w[1]});
    }
    if (j.contains("calibration")) {
        const auto& k = j.at("calibration");
        s.calibration.n_paths = k.value("n_paths", s.calibration.n_paths);
        s.calibration.n_grid = k.value("n_grid", s.calibration.n_grid);
        s.calibration.seed = k.value("seed", s.calibration.seed);
    }
    return s;
}

SweepConfig load_sweep(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config file: " + file.string());
    return SweepConfig::from_json(json::parse(in));
}

pipeline::SweepResult run_sweep(const SweepConfig& cfg, const std::filesystem::path& out_dir,
                                int jobs, cpd::CriticalValueCache& cache) {
    struct TrainingRun {
        sim::MetricSeries series;
        pipeline::AttackClass truth;
        int onset;
    };
    std::vector<std::pair<const ScenarioConfig*, std::uint64_t>> tasks;
    for (const auto seed : cfg.fdff.seeds) tasks.push_back({&cfg.fdff, seed});
    for (const auto seed : cfg.fni.seeds) tasks.push_back({&cfg.fni, seed});
    if (tasks.empty()) throw std::invalid_argument("config: sweep has no training seeds");

    std::vector<TrainingRun> runs(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const auto& [scen, seed] = tasks[i];
        auto out = sim::run(scen->sim, seed);
        runs[i] = {std::move(out.series),
                   scen->sim.attack.kind == sim::AttackKind::FDFF ? pipeline::AttackClass::FDFF
                                                                  : pipeline::AttackClass::FNI,
                   out.attack_start_window};
    });

    std::vector<pipeline::LabeledSeries> dataset;
    dataset.reserve(runs.size());
    for (const auto& r : runs) dataset.push_back({&r.series, r.truth, r.onset});
    const int horizon = std::min(cfg.fdff.post_onset_samples(), cfg.fni.post_onset_samples());

    const auto result =
        pipeline::sweep_parameters(dataset, cfg.m_set, cfg.gamma_set, cfg.confidence_set,
                                   cfg.weights, horizon, cache, cfg.calibration);

    std::filesystem::create_directories(out_dir);
    std::string grid = "metric,confidence,m,gamma,skipped,dr,dtm,s";
    for (const auto& w : cfg.weights)
        grid += strprintf(",pds_a%s", fixed_text(w.a, 2).c_str());
    grid += '\n';
    for (const auto& cell : result.cells) {
        grid += strprintf("%s,%s,%d,%s,%d,%s,%s,%s",
                          pipeline::net_metric_name(cell.metric),
                          fixed_text(cell.confidence, 2).c_str(), cell.m,
                          fixed_text(cell.gamma, 2).c_str(), cell.skipped ? 1 : 0,
                          fixed_text(cell.perf.dr, 4).c_str(),
                          fixed_text(cell.perf.dtm, 2).c_str(),
                          fixed_text(cell.perf.s, 4).c_str());
        for (const auto& [w, pds] : cell.perf.p_ds) grid += "," + fixed_text(pds, 4);
        grid += '\n';
    }
    write_file(out_dir / "pds_grid.csv", grid);

    std::string best = "metric,weight_a,weight_b";
    for (double c : cfg.confidence_set) best += strprintf(",alpha_%s", fixed_text(c, 2).c_str());
    best += '\n';
    for (const auto metric : {pipeline::NetMetric::CtrlOverhead, pipeline::NetMetric::DeliveryRate}) {
        for (const auto& w : cfg.weights) {
            best += strprintf("%s,%s,%s", pipeline::net_metric_name(metric),
                              fixed_text(w.a, 2).c_str(), fixed_text(w.b, 2).c_str());
            for (double c : cfg.confidence_set)
                best += "," + fixed_text(result.best_for(metric, w, c).gamma, 2);
            best += '\n';
        }
    }
    write_file(out_dir / "best_gamma.csv", best);
    return result;
}

}  // namespace sdnids::exp
