#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "groups.hpp"

namespace anyonprep {

// One level of the grading series: a subset of objects graded by an abelian
// group. sector[a] is the group element grading object a, or -1 if the object
// does not belong to this level's subcategory.
struct GradingLevel {
    AbelianGroup group;
    std::vector<int> sector;
};

// Unitary multiplicity-free fusion category, presented by skeletal data:
// object list (unit first), duals, quantum dimensions, fusion indicator and
// F-symbols. F-symbols are stored sparsely; admissible entries that are not
// stored are 1 (this matches the file format and keeps Vec_G data empty).
//
// Index convention for F: [F^{abc}_d]_{ef} relates the two parenthesizations
// of a x b x c with total charge d,
//   |(ab)_e c; d>  =  sum_f [F^{abc}_d]_{ef} |a (bc)_f; d>,
// admissible iff e in a@b, d in e@c, f in b@c, d in a@f. Blocks over (e,f)
// are unitary, and any F with a unit object among a,b,c equals 1.
class FusionCategory {
  public:
    using FKey = std::array<int, 6>;  // a,b,c,d,e,f

    FusionCategory() = default;

    static FusionCategory vec_zn(int n);
    static FusionCategory ising();
    static FusionCategory ty_z3();

    // Resolve a --category argument: an existing file path is loaded,
    // otherwise the name must be a builtin (ising, ty_z3, vec_zN).
    static FusionCategory named(const std::string& name);

    static FusionCategory from_json_text(const std::string& text);
    std::string to_json_text() const;

    const std::string& name() const { return name_; }
    int num_objects() const { return static_cast<int>(names_.size()); }
    int unit() const { return 0; }
    const std::string& object_name(int a) const { return names_[a]; }
    int object_index(const std::string& nm) const;

    int dual(int a) const { return dual_[a]; }
    double dim(int a) const { return qdim_[a]; }
    double total_dim2() const;  // sum_a d_a^2

    bool n(int a, int b, int c) const { return n_[idx(a, b, c)] != 0; }
    const std::vector<int>& fuse(int a, int b) const { return fuse_[a * num_objects() + b]; }

    // 0 if inadmissible, otherwise the stored value (default 1).
    cplx F(int a, int b, int c, int d, int e, int f) const;
    bool f_admissible(int a, int b, int c, int d, int e, int f) const;

    // Grading series, innermost level first. levels().back() covers all objects.
    const std::vector<GradingLevel>& levels() const { return levels_; }
    int num_levels() const { return static_cast<int>(levels_.size()); }
    // Objects of level lv (1-based) in sector g.
    std::vector<int> sector_objects(int lv, int g) const;
    // Total dimension sum d_a^2 of the trivial sector of level lv; this is the
    // normalization of the graded plaquette operators.
    double trivial_sector_dim2(int lv) const;
    // Grading of object a at level lv; a must belong to the level.
    int sector_of(int lv, int a) const;

    // Throws check_error on the first failed consistency condition:
    // unit/dual/dim axioms, fusion associativity numbers, F unitarity,
    // pentagon, grading closure and sector balance. Tolerance 1e-12.
    void validate() const;

    // FNV-1a fingerprint of the canonical serialization, for reports.
    uint64_t checksum() const;

  private:
    size_t idx(int a, int b, int c) const {
        int n = num_objects();
        return (static_cast<size_t>(a) * n + b) * n + c;
    }
    void rebuild_tables();

    std::string name_;
    std::vector<std::string> names_;
    std::vector<int> dual_;
    std::vector<double> qdim_;
    std::vector<char> n_;                       // indicator, size n^3
    std::vector<std::vector<int>> fuse_;        // fusion lists, size n^2
    std::map<FKey, cplx> f_;                    // entries differing from 1
    std::vector<GradingLevel> levels_;
};

}  // namespace anyonprep
