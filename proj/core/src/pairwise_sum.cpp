#include "isopyc/pairwise_sum.hpp"

#include <vector>

namespace isopyc {

namespace {
constexpr std::size_t kBase = 16;
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= kBase) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() <= kBase) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    const std::size_t half = a.size() / 2;
    return pairwise_dot(a.first(half), b.first(half)) +
           pairwise_dot(a.subspan(half), b.subspan(half));
}

} // namespace isopyc
