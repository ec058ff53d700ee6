#pragma once

#include <stdexcept>
#include <string>

namespace critsense {

/// A simulation produced a non-finite state, lost mass, or violated a
/// stability bound. Carries the simulation time at which it happened.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double time)
        : std::runtime_error(what + " (t = " + std::to_string(time) + " s)"), time_(time) {}
    explicit NumericalError(const std::string& what) : std::runtime_error(what), time_(0.0) {}

    [[nodiscard]] double time() const { return time_; }

private:
    double time_;
};

}  // namespace critsense
