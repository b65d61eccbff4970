#include "isopyc/field.hpp"

#include <algorithm>
#include <cmath>

namespace isopyc {

bool Field::finite() const {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double Field::min_value() const {
    double m = a.empty() ? 0.0 : a[0];
    for (double v : a) m = std::min(m, v);
    return m;
}

void add_scaled(Field& y, double s, const Field& x) {
    for (std::size_t i = 0; i < y.a.size(); ++i) y.a[i] += s * x.a[i];
}

Field difference(const Field& a, const Field& b) {
    Field out = a;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] -= b.a[i];
    return out;
}

void scale(Field& f, double s) {
    for (double& v : f.a) v *= s;
}

Field hadamard(const Field& a, const Field& b) {
    Field out = a;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] *= b.a[i];
    return out;
}

} // namespace isopyc
