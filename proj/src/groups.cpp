#include "groups.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace anyonprep {

AbelianGroup::AbelianGroup(std::vector<int> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw validation_error("group needs at least one cyclic factor");
    order_ = 1;
    for (int n : factors_) {
        if (n < 1) throw validation_error("cyclic factor must be positive");
        order_ *= n;
    }
}

AbelianGroup AbelianGroup::parse(const std::string& name) {
    std::vector<int> factors;
    size_t i = 0;
    while (i < name.size()) {
        if (name[i] != 'z' && name[i] != 'Z')
            throw validation_error("cannot parse group name '" + name + "'");
        ++i;
        size_t j = i;
        while (j < name.size() && std::isdigit(static_cast<unsigned char>(name[j]))) ++j;
        if (j == i) throw validation_error("cannot parse group name '" + name + "'");
        factors.push_back(std::stoi(name.substr(i, j - i)));
        i = j;
        if (i < name.size()) {
            if (name[i] != 'x' && name[i] != 'X')
                throw validation_error("cannot parse group name '" + name + "'");
            ++i;
        }
    }
    return AbelianGroup(factors);
}

std::string AbelianGroup::name() const {
    std::string s;
    for (size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += "x";
        s += "z" + std::to_string(factors_[i]);
    }
    return s;
}

std::vector<int> AbelianGroup::components(int g) const {
    std::vector<int> comp(factors_.size());
    for (size_t i = factors_.size(); i-- > 0;) {
        comp[i] = g % factors_[i];
        g /= factors_[i];
    }
    return comp;
}

int AbelianGroup::from_components(const std::vector<int>& comp) const {
    if (comp.size() != factors_.size())
        throw validation_error("component count does not match group rank");
    int g = 0;
    for (size_t i = 0; i < factors_.size(); ++i) {
        int c = comp[i] % factors_[i];
        if (c < 0) c += factors_[i];
        g = g * factors_[i] + c;
    }
    return g;
}

int AbelianGroup::add(int a, int b) const {
    auto ca = components(a), cb = components(b);
    for (size_t i = 0; i < factors_.size(); ++i) ca[i] = (ca[i] + cb[i]) % factors_[i];
    return from_components(ca);
}

int AbelianGroup::neg(int a) const {
    auto c = components(a);
    for (size_t i = 0; i < factors_.size(); ++i) c[i] = (factors_[i] - c[i]) % factors_[i];
    return from_components(c);
}

int AbelianGroup::power(int g, long k) const {
    auto c = components(g);
    for (size_t i = 0; i < factors_.size(); ++i) {
        long v = (static_cast<long>(c[i]) * k) % factors_[i];
        if (v < 0) v += factors_[i];
        c[i] = static_cast<int>(v);
    }
    return from_components(c);
}

cplx AbelianGroup::character(int chi, int g) const {
    auto ck = components(chi), cg = components(g);
    double phase = 0.0;
    for (size_t i = 0; i < factors_.size(); ++i) {
        phase += 2.0 * std::numbers::pi * ck[i] * cg[i] / factors_[i];
    }
    return {std::cos(phase), std::sin(phase)};
}

}  // namespace anyonprep
