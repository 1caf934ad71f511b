#include "harris/measure.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace harris {

StateSpace::StateSpace(std::size_t n, std::vector<std::string> names) : size(n), labels(std::move(names)) {
    if (size < 1) throw std::invalid_argument("StateSpace: size must be >= 1");
    if (!labels.empty()) {
        if (labels.size() != size) throw std::invalid_argument("StateSpace: label count must equal size");
        std::set<std::string> uniq(labels.begin(), labels.end());
        if (uniq.size() != labels.size()) throw std::invalid_argument("StateSpace: labels must be distinct");
    }
}

SignedMeasure::SignedMeasure(Vector values) : values_(std::move(values)) {
    if (values_.size() == 0) throw std::invalid_argument("SignedMeasure: empty vector");
    if (!values_.allFinite()) throw std::invalid_argument("SignedMeasure: entries must be finite");
}

SignedMeasure SignedMeasure::dirac(std::size_t n, std::size_t state) {
    if (state >= n) throw std::invalid_argument("SignedMeasure::dirac: state out of range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    v[static_cast<Eigen::Index>(state)] = 1.0;
    return SignedMeasure(std::move(v));
}

WeightFunction::WeightFunction(Vector values) : values_(std::move(values)) {
    if (values_.size() == 0) throw std::invalid_argument("WeightFunction: empty vector");
    if (!values_.allFinite()) throw std::invalid_argument("WeightFunction: entries must be finite");
    if ((values_.array() < 1.0).any()) throw std::invalid_argument("WeightFunction: every entry must be >= 1");
}

std::pair<SignedMeasure, SignedMeasure> hahn_jordan(const SignedMeasure& mu) {
    Vector plus = mu.values().cwiseMax(0.0);
    Vector minus = (-mu.values()).cwiseMax(0.0);
    return {SignedMeasure(std::move(plus)), SignedMeasure(std::move(minus))};
}

double total_variation(const SignedMeasure& mu) {
    // accumulate the two signs separately: the Hahn-Jordan split identity
    // TV(mu+) + TV(mu-) = TV(mu) then holds bit for bit
    return mu.values().cwiseMax(0.0).sum() + (-mu.values()).cwiseMax(0.0).sum();
}

double weighted_norm(const SignedMeasure& mu, const WeightFunction& V) {
    if (mu.size() != V.size()) throw std::invalid_argument("weighted_norm: length mismatch");
    return (V.values().array() * mu.values().array().abs()).sum();
}

double triple_norm(const SignedMeasure& mu, const WeightFunction& V, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("triple_norm: beta must be > 0");
    return total_variation(mu) + beta * weighted_norm(mu, V);
}

}  // namespace harris
