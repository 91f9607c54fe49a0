#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stringnet.hpp"

namespace anyonprep {
namespace afdlu {

// One gauging round at level lv of the category's grading series: a fresh
// group-valued ancilla per plaquette, entangled by controlled plaquette
// operators and measured in the character basis. reps[g] is the sector
// representative the controlled operator applies (the lowest object index in
// sector g), and basis[chi][g] = conj(chi(g)) / sqrt(|G|) rotates an ancilla
// into the character basis.
struct GaugingRound {
    int level = 0;
    AbelianGroup group;
    std::vector<int> ancilla;  // ancilla register per face
    std::vector<int> reps;     // representative object per sector
    std::vector<std::vector<cplx>> basis;
};

struct MeasurementRecord {
    int face = -1;
    int outcome = 0;     // character index
    double probability = 0.0;
};

// One feedforward string: moves the plaquette charge chi from from_face onto
// to_face along the listed dual-path edges.
struct CorrectionRecord {
    int from_face = -1;
    int to_face = -1;
    int chi = 0;
    std::vector<int> edges;
};

struct RoundRecord {
    int level = 0;
    std::vector<MeasurementRecord> measurements;
    std::vector<CorrectionRecord> corrections;
};

struct ProtocolTranscript {
    std::string category;
    int lx = 0, ly = 0;
    uint64_t seed = 0;
    std::vector<RoundRecord> rounds;
    uint64_t state_checksum = 0;
};

// Append one |+> ancilla per face (face order) and describe the round.
GaugingRound attach_round(const stringnet::Context& ctx, SparseState& s, int lv);

// CB_p: apply B_p^g conditioned on the plaquette ancilla holding g, realized
// through the sector representative, B_p^g = B_p^{s_g} / d_{s_g}. The
// identity branch is left untouched, which extends the controlled operator
// by the identity outside the trivial-flux sector. adjoint applies the
// conjugate operator (dual representatives).
SparseState controlled_Bp(const stringnet::Context& ctx, const SparseState& s,
                          const GaugingRound& round, int face, bool adjoint = false);

// prod_p CB_p with no measurement: the symmetry-enriched entangled state.
SparseState set_entangler(const stringnet::Context& ctx, const SparseState& s,
                          const GaugingRound& round);

// The on-site global symmetry of the entangled state: shift every plaquette
// ancilla of the round by g.
SparseState global_ancilla_shift(const SparseState& s, const GaugingRound& round, int g);

// Branch projector of a level-lv plaquette measurement with outcome chi,
//   (1/|G|) sum_g conj(chi(g)) B_p^g
// built from the graded plaquette components. chi = 0 gives the level-lv
// flux projector.
SparseState outcome_projector(const stringnet::Context& ctx, const SparseState& s, int face,
                              int lv, int chi);

// Measure the round's ancillas in the character basis (face order), retire
// them, and pair all nontrivial outcomes with character strings so every
// residual plaquette charge fuses to vacuum.
std::pair<SparseState, RoundRecord> finish_round(const stringnet::Context& ctx,
                                                 const SparseState& s, const GaugingRound& round,
                                                 Rng& rng);

// One Kramers-Wannier gauging round: attach, entangle, measure, correct.
// The input must be symmetric under the level's plaquette sheet
// prod_p B_p^g (see symmetrize_sheet); otherwise some measurement branches
// carry a total charge that no string can cancel, and finish_round raises
// the protocol-violation error.
std::pair<SparseState, RoundRecord> kw_round(const stringnet::Context& ctx, const SparseState& s,
                                             int lv, Rng& rng);

// Project onto the symmetric sector of the level's global sheet,
// (1/|G|) sum_g prod_p B_p^g, and renormalize. For vec-type levels the sheet
// is the identity and this is a no-op. On a torus the sheet of a sigma-type
// level is a sum of noncontractible flux loops, so the bare ground state
// prod_p B_p |0> is not symmetric; rounds must be fed the symmetrized state.
SparseState symmetrize_sheet(const stringnet::Context& ctx, const SparseState& s, int lv);

// Run every round of the grading series starting from the vacuum product
// state. Returns the prepared ground state and the full transcript.
std::pair<SparseState, ProtocolTranscript> prepare(const FusionCategory& cat, const Lattice& lat,
                                                   uint64_t seed);

// Stable line format; byte-identical for identical (category, lattice, seed).
std::string to_text(const ProtocolTranscript& t);

}  // namespace afdlu
}  // namespace anyonprep
