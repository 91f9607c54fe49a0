#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "afdlu.hpp"

namespace anyonprep {
namespace anyons {

// Half-braiding table of one string type. A row {a, r, s, b} -> Omega means:
// the string arrives at an edge labelled a carrying leg r, and leaves the
// crossing with the edge relabelled b and leg s, weighted by
//     Omega * sqrt( d_b / (d_a * sqrt(d_r * d_s)) ).
// Rows absent from the map vanish. Crossings against the string's co-oriented
// frame use the entrywise adjoint of the same table (old edge matched in the
// b slot, coefficient conjugated, same weight).
struct HalfBraiding {
    std::string label;
    std::map<std::array<int, 4>, cplx> table;
};

// Unit string: one row {a, 0, 0, a} -> 1 per object. Identity on any state.
HalfBraiding trivial_string(const FusionCategory& cat);

// Z3 dyon strings on objects {0,1,2} (valid for vec_z3 and for the trivial
// sector of ty_z3): rows {a, r, r, a+r} -> w^{-r a}, w = exp(2 pi i / 3),
// with r = 1 for em* and r = 2 for e*m.
HalfBraiding em_star_string();
HalfBraiding e_star_m_string();

// The non-abelian phi string of the gauged theory: both Z3 rows above plus
// the leg-flipping duality rows {sigma, 1, 2, sigma} and {sigma, 2, 1, sigma},
// both w^2 in the gauge where the duality-wall toll is fixed to n = 0.
HalfBraiding phi_string();

// Pull a string of type hb along a dual path. Both endpoint faces must be
// punctured: the string enters through the tail of path.front().from_face and
// exits through the tail of path.back().to_face, fusing its leg into the tail
// labels. Between crossings the string runs along the face boundary (the
// stretch away from the edge it just passed through), shifting the edges it
// covers by the leg it carries.
SparseState apply_string(const stringnet::Context& ctx, const SparseState& s,
                         const HalfBraiding& hb, const std::vector<Lattice::Crossing>& path);

// One tube-algebra basis element T^s_{p q r} with a scalar coefficient: a
// loop of s around a punctured face, resolved through channel q, taking the
// tail label from r to p. Sector bookkeeping lives at the outermost grading
// level: p and r must sit in the trivial sector, s and q in a common sector.
struct TubeElement {
    int s = 0;
    int p = 0;
    int q = 0;
    int r = 0;
    cplx coeff = 1.0;
};

// Check the sector constraints above; throws check_error on violation.
void validate_tube(const FusionCategory& cat, const std::vector<TubeElement>& elems);

// Sum of the listed tube elements applied at one punctured face.
SparseState apply_tube(const stringnet::Context& ctx, const SparseState& s, int face,
                       const std::vector<TubeElement>& elems);

// Domain wall B^g of one anyon sector at a punctured face: the weighted tube
// combination whose postselected product over g projects onto that anyon.
// Walls compose as B^h B^g = B^{hg} (all stored anyons carry linear
// representations, so the factor system is trivial).
struct DomainWallOp {
    std::string anyon;
    int level = 0;  // grading level the wall belongs to (outermost)
    int g = 0;
    std::vector<TubeElement> elements;
};

// Stored wall data: "vacuum" for any graded category (the graded plaquette
// component with a trivial tail channel), "phi" for the Z3 Tambara-Yamagami
// structure. Unknown labels are rejected.
DomainWallOp domain_wall(const FusionCategory& cat, const std::string& anyon, int g);

// Minimal projector onto one anyon type at a punctured face, as tube
// elements: the character-weighted average of that anyon's walls over the
// outermost grading group. Stored labels: "vacuum" and "phi".
std::vector<TubeElement> idempotent(const FusionCategory& cat, const std::string& anyon);

// Ancilla preparation data for one gauged plaquette: the centralizer
// representation whose character basis the measurement uses. Only the
// one-dimensional trivial representation is realized.
struct CentralizerRep {
    int dim = 1;
    int character = 0;
};

// Controlled domain wall: branch g of the round's plaquette ancilla applies
// the g wall of the given anyon at this face. The punctured-face counterpart
// of controlled_Bp.
SparseState controlled_wall(const stringnet::Context& ctx, const SparseState& s,
                            const afdlu::GaugingRound& round, int face, const std::string& anyon);

// Deterministic gauging map: attach a round at level lv, entangle every face
// (controlled_Bp on plain faces, controlled walls on the faces listed in
// tail_anyons), then contract every ancilla back onto |+>. Equals the
// measurement-free projector product prod_plain (avg_g B^g) prod_tailed P^a.
// Every punctured face must be listed; plain faces must not be.
SparseState kw_postselect(const stringnet::Context& ctx, const SparseState& s, int lv,
                          const std::map<int, std::string>& tail_anyons);

// prod over faces of the g component: graded plaquette components on plain
// faces, anyon walls on the listed punctured faces.
SparseState sheet_with_anyons(const stringnet::Context& ctx, const SparseState& s, int lv, int g,
                              const std::map<int, std::string>& tail_anyons);

// Average of sheet_with_anyons over g, renormalized. Inputs with no
// symmetric component are rejected (check_error), as in symmetrize_sheet.
SparseState symmetrize_with_anyons(const stringnet::Context& ctx, const SparseState& s, int lv,
                                   const std::map<int, std::string>& tail_anyons);

// One gauging round in the presence of anyons: the entangler of
// kw_postselect, then the standard character-basis plaquette measurements
// with string feedforward. Residual charges at punctured faces are fused
// into the anyon there by the same correction strings. The input must carry
// a symmetric component branch for every outcome, as in kw_round. reps may
// assign a centralizer representation per punctured face; anything beyond
// the trivial one-dimensional representation throws (projective ancilla
// preparations are an open end, not a supported path).
std::pair<SparseState, afdlu::RoundRecord> gauge_with_anyons(
    const stringnet::Context& ctx, const SparseState& s, int lv,
    const std::map<int, std::string>& tail_anyons, Rng& rng,
    const std::map<int, CentralizerRep>& reps = {});

}  // namespace anyons
}  // namespace anyonprep
