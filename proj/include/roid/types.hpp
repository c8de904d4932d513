#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace roid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Shape of a third-order tensor. All public indices are 1-based.
struct Dims3 {
    Index i1 = 0;
    Index i2 = 0;
    Index i3 = 0;

    Index count() const { return i1 * i2 * i3; }
    Index extent(int mode) const {
        switch (mode) {
            case 1: return i1;
            case 2: return i2;
            case 3: return i3;
        }
        return 0;
    }
    bool operator==(const Dims3&) const = default;
};

// Error taxonomy. Shape problems and mode/k/p ranges are reported separately
// so callers can distinguish misuse from malformed data.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DegenerateInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace roid
