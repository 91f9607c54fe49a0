#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "common.hpp"
#include "lattice.hpp"

namespace anyonprep {

// Packed configuration key: every register gets a fixed bit field inside two
// 64-bit words. Fields never straddle the word boundary.
struct Key {
    uint64_t w0 = 0, w1 = 0;
    friend bool operator==(const Key&, const Key&) = default;
    friend auto operator<=>(const Key&, const Key&) = default;
};

// Ordered register table: lattice edges first (register index == edge id),
// ancillas appended. Layouts are immutable; adding or retiring registers makes
// a new layout. States keep a shared_ptr to theirs.
class Layout {
  public:
    enum class Kind { Edge, FaceAncilla, VertexAncilla };
    struct Register {
        Kind kind;
        int ref;    // edge id, face id, or vertex id
        int radix;  // number of basis labels
    };

    Layout() = default;

    static std::shared_ptr<const Layout> edges(const Lattice& lat, int radix);

    std::shared_ptr<const Layout> with_register(Kind kind, int ref, int radix) const;
    std::shared_ptr<const Layout> without_register(int reg) const;
    // Extend by the new edge registers of a larger lattice (tail materialization).
    std::shared_ptr<const Layout> with_edges_of(const Lattice& bigger, int radix) const;

    int num_registers() const { return static_cast<int>(regs_.size()); }
    const Register& reg(int i) const { return regs_[i]; }
    int num_edge_registers() const { return num_edges_; }
    int find(Kind kind, int ref) const;  // -1 if absent

    int get(const Key& k, int reg) const;
    void set(Key& k, int reg, int val) const;

    // True when this layout's registers are a prefix of other's.
    bool prefix_of(const Layout& other) const;

  private:
    void assign_fields();

    std::vector<Register> regs_;
    std::vector<int> word_, shift_, width_;
    int num_edges_ = 0;
};

// Sparse state vector: entries sorted by key, amplitudes below PRUNE_EPS
// dropped. Operators return new states; inputs are never mutated.
struct SparseState {
    std::shared_ptr<const Layout> layout;
    std::vector<std::pair<Key, cplx>> amp;

    double norm2() const;
    SparseState normalized() const;
};

// Worker threads used by the parallel paths (0 = OpenMP default). The value
// never changes results, only timing; reductions are ordered independently of
// the worker count.
void set_threads(int n);
int threads();

SparseState make_basis_state(std::shared_ptr<const Layout> layout, const Key& k);

// Sort by key, combine duplicates in their current order, prune.
void canonicalize(SparseState& s);

cplx inner(const SparseState& a, const SparseState& b);
SparseState add(const SparseState& a, const SparseState& b, cplx cb = 1.0);
SparseState scaled(const SparseState& a, cplx c);
// |<a|b>| / (|a| |b|)
double fidelity(const SparseState& a, const SparseState& b);

// A local kernel maps the values of the support registers to a superposition
// of replacement values. emit may be called any number of times; calls must
// be deterministic in the input values.
using EmitFn = std::function<void(const std::vector<int>&, cplx)>;
using KernelFn = std::function<void(const std::vector<int>&, const EmitFn&)>;

SparseState apply_kernel(const SparseState& s, const std::vector<int>& regs, const KernelFn& k);
SparseState apply_kernel_serial(const SparseState& s, const std::vector<int>& regs,
                                const KernelFn& k);

SparseState apply_diag(const SparseState& s, const std::function<cplx(const Key&)>& phase);

// Single-register basis rotation. u[new][old], unitary d x d.
SparseState rotate_register(const SparseState& s, int reg, const std::vector<std::vector<cplx>>& u);

// Measure a classical function of the configuration (a diagonal projective
// family). Returns the sampled outcome; prob_out receives its Born
// probability; the state collapses and renormalizes.
int measure_value(SparseState& s, const std::function<int(const Key&)>& fn, Rng& rng,
                  double* prob_out = nullptr);

// Measure a general projective family given by kernels. Probabilities are
// computed as <psi|P_i|psi>; the family must be complete on the state.
int measure_family(SparseState& s, const std::vector<std::function<SparseState(const SparseState&)>>& projectors,
                   Rng& rng, double* prob_out = nullptr);

// Append a register in the given single-register state (e.g. a |+> ancilla).
SparseState with_new_register(const SparseState& s, std::shared_ptr<const Layout> bigger,
                              int new_reg, const std::vector<cplx>& init);

// General extension to a layout with appended registers; init_new fills the
// new registers' values per old configuration (defaults 0).
SparseState extended(const SparseState& s, std::shared_ptr<const Layout> bigger,
                     const std::function<void(const Key&, Key&)>& init_new = {});

// Remove a register that is in a known product state (after measurement).
// Throws check_error if the state does not factor at tolerance 1e-10.
SparseState contract_register(const SparseState& s, int reg, const std::vector<cplx>& known);

// FNV-1a fingerprint of the canonical serialization (sorted keys, %.17g
// amplitudes). States produced by deterministic pipelines hash identically
// across runs and thread counts.
uint64_t state_checksum(const SparseState& s);

}  // namespace anyonprep
