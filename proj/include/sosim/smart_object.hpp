#pragma once

#include "sosim/types.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sosim {

/// Slotted circular buffer over the last N seconds with a per-sensor
/// occurrence accumulator. One push per second; the slot at `ptr()` always
/// holds the oldest entry.
class EventWindow {
public:
    EventWindow(std::size_t slots, std::size_t sensors);

    /// Evicts the oldest entry, stores `entry` in its place and advances the
    /// pointer. O(1). Throws std::out_of_range for an index >= sensors().
    Entry push(Entry entry);

    std::size_t capacity() const noexcept { return slots_.size(); }
    std::size_t sensors() const noexcept { return static_cast<std::size_t>(acc_.size()); }
    std::size_t ptr() const noexcept { return ptr_; }
    Entry nval() const noexcept { return nval_; }
    Entry slot(std::size_t i) const;
    const CountVector& acc() const noexcept { return acc_; }

private:
    static constexpr SensorIndex kVacant = -1;

    std::vector<SensorIndex> slots_;
    std::size_t ptr_ = 0;
    CountVector acc_;
    Entry nval_;
};

inline Entry window_push(EventWindow& window, Entry entry) { return window.push(entry); }

/// Recounts the slot array without using the accumulator.
CountVector recount(const EventWindow& window);

struct NBConfig {
    std::int32_t fixed_point_scale = 256;  // Q
    double laplace_alpha = 1.0;
    std::int64_t w_max = (std::int64_t{1} << 15) - 1;
};

/// One binary naive-Bayes detector with integer log-likelihood-ratio weights.
template <std::signed_integral Scalar>
struct BasicNBModel {
    Vector<Scalar> weights;
    Scalar threshold = 1;
    std::uint32_t n = 0;  // positive snapshots
    std::uint32_t m = 0;  // negative snapshots
    CountVector c;        // positive snapshots containing each sensor
    CountVector d;        // negative snapshots containing each sensor
    int scale_shift = 0;
    bool above = false;
    NBConfig config;

    BasicNBModel() = default;
    explicit BasicNBModel(std::size_t sensors, NBConfig cfg = {})
        : weights(Vector<Scalar>::Zero(static_cast<Eigen::Index>(sensors))),
          c(CountVector::Zero(static_cast<Eigen::Index>(sensors))),
          d(CountVector::Zero(static_cast<Eigen::Index>(sensors))),
          config(cfg) {}

    std::size_t sensors() const noexcept { return static_cast<std::size_t>(weights.size()); }

    friend bool operator==(const BasicNBModel& a, const BasicNBModel& b) {
        return a.weights == b.weights && a.threshold == b.threshold && a.n == b.n && a.m == b.m && a.c == b.c &&
               a.d == b.d && a.scale_shift == b.scale_shift && a.above == b.above &&
               a.config.fixed_point_scale == b.config.fixed_point_scale &&
               a.config.laplace_alpha == b.config.laplace_alpha && a.config.w_max == b.config.w_max;
    }
};

using NBModel = BasicNBModel<std::int32_t>;

/// Binary presence of each sensor in the window.
inline auto presence(const EventWindow& window) { return (window.acc().array() > 0); }

/// Sum of the weights of every sensor present at least once. Uses the
/// accumulator only, so cost is proportional to the sensor count.
template <typename Scalar>
std::int64_t window_score(const EventWindow& window, const BasicNBModel<Scalar>& model) {
    return presence(window).select(model.weights.template cast<std::int64_t>(), std::int64_t{0}).sum();
}

/// Reference score: walks every slot, builds the presence set, sums weights.
template <typename Scalar>
std::int64_t window_score_oracle(const EventWindow& window, const BasicNBModel<Scalar>& model) {
    std::vector<bool> seen(model.sensors(), false);
    std::int64_t score = 0;
    for (std::size_t i = 0; i < window.capacity(); ++i) {
        const Entry e = window.slot(i);
        if (!e || seen[static_cast<std::size_t>(*e)]) continue;
        seen[static_cast<std::size_t>(*e)] = true;
        score += model.weights[*e];
    }
    return score;
}

/// Halves every weight and the threshold (arithmetic shift) until all fit
/// in [-w_max, w_max]; each halving increments scale_shift.
template <typename Scalar>
void rescale(BasicNBModel<Scalar>& model) {
    const auto limit = model.config.w_max;
    auto exceeds = [&] {
        const auto t = static_cast<std::int64_t>(model.threshold);
        return (model.weights.size() > 0 && model.weights.template cast<std::int64_t>().cwiseAbs().maxCoeff() > limit) ||
               t > limit || t < -limit;
    };
    while (exceeds()) {
        model.weights = model.weights.unaryExpr([](Scalar w) { return static_cast<Scalar>(w >> 1); });
        model.threshold = static_cast<Scalar>(model.threshold >> 1);
        ++model.scale_shift;
    }
}

/// Recomputes weights and the dynamic threshold from the counts, then rescales.
///
/// weight[s] = round(Q * (ln((c+a)/(n+2a)) - ln((d+a)/(m+2a)))) >> scale_shift
/// threshold = round((mean positive score + mean negative score) / 2), where
/// the means are taken over all snapshots seen so far under the current
/// weights (computable from the counts because the score is linear in
/// presence). An empty negative set contributes a mean of 0. With no
/// positive snapshot the model stays untrained: zero weights, threshold 1.
template <typename Scalar>
void recompute(BasicNBModel<Scalar>& model) {
    if (model.n == 0) {
        model.weights.setZero();
        model.threshold = 1;
        rescale(model);
        return;
    }
    const double a = model.config.laplace_alpha;
    const double q = model.config.fixed_point_scale;
    const Eigen::ArrayXd pos = ((model.c.template cast<double>().array() + a) / (model.n + 2.0 * a)).log();
    const Eigen::ArrayXd neg = ((model.d.template cast<double>().array() + a) / (model.m + 2.0 * a)).log();
    const Eigen::ArrayXd raw = (q * (pos - neg)).round();
    const int shift = model.scale_shift;
    model.weights = raw.unaryExpr([shift](double v) { return static_cast<Scalar>(static_cast<std::int64_t>(v) >> shift); })
                        .matrix();

    const Eigen::ArrayXd w = model.weights.template cast<double>().array();
    const double mean_pos = (w * model.c.template cast<double>().array()).sum() / model.n;
    const double mean_neg = model.m == 0 ? 0.0 : (w * model.d.template cast<double>().array()).sum() / model.m;
    model.threshold = static_cast<Scalar>(std::llround((mean_pos + mean_neg) / 2.0));
    rescale(model);
}

/// Positive update from a window snapshot taken when the action is annotated.
template <typename Scalar>
void learn(BasicNBModel<Scalar>& model, const EventWindow& snapshot) {
    ++model.n;
    model.c += presence(snapshot).template cast<std::uint32_t>().matrix();
    recompute(model);
}

/// Negative update from a snapshot taken outside every interval of the action.
template <typename Scalar>
void observe_negative(BasicNBModel<Scalar>& model, const EventWindow& snapshot) {
    ++model.m;
    model.d += presence(snapshot).template cast<std::uint32_t>().matrix();
    recompute(model);
}

/// Compares `score` with the threshold, updates the latch and reports a rising edge.
template <typename Scalar>
bool update_latch(BasicNBModel<Scalar>& model, std::int64_t score) {
    const bool now = score > static_cast<std::int64_t>(model.threshold);
    const bool rising = now && !model.above;
    model.above = now;
    return rising;
}

struct SmartObjectConfig {
    std::size_t window_seconds = 1800;
    NBConfig nb;
};

/// A window shared by independent per-action detectors, wired to a fixed set
/// of sensors. Sensor indices in the public interface are the caller's
/// (global) indices; they are mapped to dense local inputs internally.
///
/// Not thread-safe; a single owner drives it one tick at a time.
template <std::signed_integral Scalar>
class BasicSmartObject {
public:
    struct Instance {
        std::string action;
        BasicNBModel<Scalar> model;
    };

    BasicSmartObject(std::vector<SensorIndex> sensor_subset, const std::vector<std::string>& actions,
                     SmartObjectConfig config = {})
        : subset_(std::move(sensor_subset)), window_(config.window_seconds, subset_.size()), config_(config) {
        for (std::size_t i = 0; i < subset_.size(); ++i)
            if (!local_.emplace(subset_[i], static_cast<SensorIndex>(i)).second)
                throw InvalidConfig("sensor " + std::to_string(subset_[i]) + " wired twice");
        for (const auto& a : actions) {
            if (std::any_of(instances_.begin(), instances_.end(), [&](const Instance& i) { return i.action == a; }))
                throw InvalidConfig("duplicate action '" + a + "'");
            instances_.push_back({a, BasicNBModel<Scalar>(subset_.size(), config.nb)});
        }
    }

    /// Pushes one entry (a global sensor index, or empty for an event-free
    /// second) and returns the actions whose score crossed the threshold on
    /// a rising edge.
    std::vector<std::string> predict(Entry entry) {
        if (entry) entry = local_index(*entry);
        window_.push(entry);
        std::vector<std::string> emitted;
        for (auto& inst : instances_)
            if (update_latch(inst.model, window_score(window_, inst.model))) emitted.push_back(inst.action);
        return emitted;
    }

    void learn(const std::string& action) { sosim::learn(model(action), window_); }
    void learn(const std::string& action, const EventWindow& snapshot) { sosim::learn(model(action), snapshot); }
    void observe_negative(const std::string& action) { sosim::observe_negative(model(action), window_); }
    void observe_negative(const std::string& action, const EventWindow& snapshot) {
        sosim::observe_negative(model(action), snapshot);
    }

    BasicNBModel<Scalar>& model(const std::string& action) {
        for (auto& inst : instances_)
            if (inst.action == action) return inst.model;
        throw UnknownAction(action);
    }
    const BasicNBModel<Scalar>& model(const std::string& action) const {
        return const_cast<BasicSmartObject*>(this)->model(action);
    }

    SensorIndex local_index(SensorIndex global) const {
        const auto it = local_.find(global);
        if (it == local_.end()) throw UnregisteredSensor(global);
        return it->second;
    }

    const EventWindow& window() const noexcept { return window_; }
    const std::vector<Instance>& instances() const noexcept { return instances_; }
    std::span<const SensorIndex> sensor_subset() const noexcept { return subset_; }
    const SmartObjectConfig& config() const noexcept { return config_; }

private:
    std::vector<SensorIndex> subset_;
    std::unordered_map<SensorIndex, SensorIndex> local_;
    EventWindow window_;
    std::vector<Instance> instances_;
    SmartObjectConfig config_;
};

using SmartObject = BasicSmartObject<std::int32_t>;

}  // namespace sosim
