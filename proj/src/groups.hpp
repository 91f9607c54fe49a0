#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"

namespace anyonprep {

// Finite abelian group as a product of cyclic factors Z_{n1} x ... x Z_{nk}.
// Elements are flat indices into the mixed-radix enumeration (last factor
// fastest). Characters are indexed the same way: chi_k(g) = prod_i w_{n_i}^{k_i g_i}.
class AbelianGroup {
  public:
    AbelianGroup() = default;
    explicit AbelianGroup(std::vector<int> factors);

    // Parse "z2", "z3", "z2xz2", ...
    static AbelianGroup parse(const std::string& name);

    int order() const { return order_; }
    const std::vector<int>& factors() const { return factors_; }
    std::string name() const;

    int add(int a, int b) const;
    int neg(int a) const;
    int identity() const { return 0; }

    // g repeated k times (k may be negative).
    int power(int g, long k) const;

    cplx character(int chi, int g) const;

    std::vector<int> components(int g) const;
    int from_components(const std::vector<int>& comp) const;

  private:
    std::vector<int> factors_;
    int order_ = 1;
};

}  // namespace anyonprep
