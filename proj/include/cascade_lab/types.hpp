#pragma once
// Basic vocabulary shared by every module: bits, node indices, errors and
// the private-signal model.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cascade {

// A binary decision or signal, always 0 or 1.
using Bit = std::uint8_t;

// Nodes are numbered 1..n in every public interface.
using NodeIndex = std::size_t;

// Malformed arguments or input files.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An exact computation was asked for an instance beyond its enumeration bound.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Accuracy p of each private signal and the ground truth b.
struct SignalModel {
    double p = 2.0 / 3.0;
    Bit truth = 1;

    // p = 1 is accepted so that deterministic fixtures can be built.
    static SignalModel make(double p, Bit truth = 1) {
        if (!(p > 0.5 && p <= 1.0))
            throw InputError("signal accuracy must satisfy 0.5 < p <= 1, got " + std::to_string(p));
        if (truth > 1)
            throw InputError("ground truth must be 0 or 1");
        return SignalModel{p, truth};
    }
};

inline void require_accuracy(double p) {
    if (!(p > 0.5 && p < 1.0))
        throw InputError("signal accuracy must satisfy 0.5 < p < 1, got " + std::to_string(p));
}

} // namespace cascade
