#pragma once

// Random inputs shared by the unit tests and the acceptance binary.

#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"

namespace gen {

struct Regression {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    oracle::Mat xm;
    oracle::Vec yv;
    double alpha = 0.7;
    int degree = 1;
};

/// n in [10, 30], p in [1, 3]; some columns are 0/1 indicators, some values repeat.
inline Regression regression(std::mt19937_64& g) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Regression r;
    const int n = 10 + static_cast<int>(g() % 21);
    const int p = 1 + static_cast<int>(g() % 3);
    r.degree = (g() % 4 == 0 && p <= 2) ? 2 : 1;
    r.alpha = 0.35 + 0.65 * u(g);
    r.x.resize(n, p);
    r.y.resize(n);
    for (int j = 0; j < p; ++j) {
        const int kind = j == 0 ? 0 : static_cast<int>(g() % 3);
        for (int i = 0; i < n; ++i) {
            if (kind == 1) r.x(i, j) = u(g) < 0.3 ? 1.0 : 0.0;
            else if (kind == 2) r.x(i, j) = static_cast<double>(g() % 6);
            else r.x(i, j) = 5.0 + 3.0 * z(g);
        }
    }
    for (int i = 0; i < n; ++i) r.y(i) = 2.0 * r.x(i, 0) - r.x(i, p - 1) + std::sin(r.x(i, 0)) * 3.0 + z(g);
    for (int i = 0; i < n; ++i) {
        r.xm.push_back(oracle::Vec(r.x.row(i).data(), r.x.row(i).data() + 0));
        for (int j = 0; j < p; ++j) r.xm.back().push_back(r.x(i, j));
        r.yv.push_back(r.y(i));
    }
    return r;
}

}  // namespace gen
