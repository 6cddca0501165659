#include "sosim/smart_object.hpp"

#include <stdexcept>

namespace sosim {

EventWindow::EventWindow(std::size_t slots, std::size_t sensors)
    : slots_(slots, kVacant), acc_(CountVector::Zero(static_cast<Eigen::Index>(sensors))) {
    if (slots == 0) throw InvalidConfig("window needs at least one slot");
}

Entry EventWindow::push(Entry entry) {
    if (entry && (*entry < 0 || *entry >= acc_.size()))
        throw std::out_of_range("sensor index " + std::to_string(*entry) + " outside window inputs");
    nval_ = entry;
    const SensorIndex oldest = slots_[ptr_];
    if (oldest != kVacant) --acc_[oldest];
    if (entry) ++acc_[*entry];
    slots_[ptr_] = entry.value_or(kVacant);
    ptr_ = (ptr_ + 1) % slots_.size();
    return oldest == kVacant ? Entry{} : Entry{oldest};
}

Entry EventWindow::slot(std::size_t i) const {
    const SensorIndex s = slots_.at(i);
    return s == kVacant ? Entry{} : Entry{s};
}

CountVector recount(const EventWindow& window) {
    CountVector counts = CountVector::Zero(static_cast<Eigen::Index>(window.sensors()));
    for (std::size_t i = 0; i < window.capacity(); ++i)
        if (const Entry e = window.slot(i)) ++counts[*e];
    return counts;
}

}  // namespace sosim
