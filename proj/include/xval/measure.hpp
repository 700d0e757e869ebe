#pragma once

#include <Eigen/Dense>
#include <vector>

namespace xval {

/// Finite weighted sum of point masses.
struct AtomicMeasure {
    struct Atom {
        Eigen::VectorXd location;
        double mass = 0;
    };
    std::vector<Atom> atoms;

    double total_mass() const {
        double s = 0;
        for (const auto& a : atoms) s += a.mass;
        return s;
    }
    int size() const { return static_cast<int>(atoms.size()); }
};

}  // namespace xval
