#pragma once

#include <optional>

#include "sdnids/cpd/detector.hpp"
#include "sdnids/sim/metrics.hpp"

namespace sdnids::pipeline {

enum class NetMetric { CtrlOverhead, DeliveryRate };
enum class AttackClass { FDFF, FNI, NoAttack };

const char* net_metric_name(NetMetric m);
const char* attack_class_name(AttackClass c);

struct AttackLabel {
    AttackClass label = AttackClass::NoAttack;
    std::optional<int> trigger_window;
    std::optional<NetMetric> triggered_metric;
};

/// Two parallel detectors over the network-wide series; the first trigger
/// classifies the attack: control overhead first = FDFF, delivery rate first
/// = FNI. A same-window double trigger counts as FDFF. After the first
/// trigger both detectors stop and no further label is produced.
class CentralizedDetector {
public:
    CentralizedDetector(cpd::Detector overhead, cpd::Detector delivery);

    // Feed one window; returns the label on the first trigger.
    std::optional<AttackLabel> step(double ctrl_overhead, double delivery_rate);

    // Run-level verdict: NoAttack unless a trigger happened.
    AttackLabel verdict() const { return label_; }
    bool stopped() const { return stopped_; }
    int windows_seen() const { return window_; }

private:
    cpd::Detector overhead_;
    cpd::Detector delivery_;
    bool stopped_ = false;
    int window_ = 0;
    AttackLabel label_{};
};

// Drives a detector pair over a complete series; returns the verdict.
AttackLabel classify_series(CentralizedDetector& det, const sim::MetricSeries& series);

}  // namespace sdnids::pipeline
