#include "state.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace anyonprep {

namespace {
std::atomic<int> g_threads{0};

int width_for(int radix) {
    if (radix < 2) throw validation_error("register radix must be at least 2");
    int w = 1;
    while ((1 << w) < radix) ++w;
    return w;
}
}  // namespace

void set_threads(int n) {
    g_threads.store(n);
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#endif
}

int threads() {
#ifdef _OPENMP
    int n = g_threads.load();
    return n > 0 ? n : omp_get_max_threads();
#else
    return 1;
#endif
}

// ---------------------------------------------------------------------------
// Layout

void Layout::assign_fields() {
    word_.resize(regs_.size());
    shift_.resize(regs_.size());
    width_.resize(regs_.size());
    int word = 0, bit = 0;
    for (size_t i = 0; i < regs_.size(); ++i) {
        int w = width_for(regs_[i].radix);
        if (bit + w > 64) {
            ++word;
            bit = 0;
        }
        if (word > 1) throw resource_error("configuration key exceeds 128 bits");
        word_[i] = word;
        shift_[i] = bit;
        width_[i] = w;
        bit += w;
    }
}

std::shared_ptr<const Layout> Layout::edges(const Lattice& lat, int radix) {
    auto lay = std::make_shared<Layout>();
    for (int e = 0; e < lat.num_edges(); ++e)
        lay->regs_.push_back({Kind::Edge, e, radix});
    lay->num_edges_ = lat.num_edges();
    lay->assign_fields();
    return lay;
}

std::shared_ptr<const Layout> Layout::with_register(Kind kind, int ref, int radix) const {
    auto lay = std::make_shared<Layout>(*this);
    lay->regs_.push_back({kind, ref, radix});
    lay->assign_fields();
    return lay;
}

std::shared_ptr<const Layout> Layout::with_edges_of(const Lattice& bigger, int radix) const {
    for (const auto& r : regs_)
        if (r.kind != Kind::Edge)
            throw check_error("edge registers must be extended before ancillas are attached");
    auto lay = std::make_shared<Layout>(*this);
    for (int e = num_edges_; e < bigger.num_edges(); ++e)
        lay->regs_.push_back({Kind::Edge, e, radix});
    lay->num_edges_ = bigger.num_edges();
    lay->assign_fields();
    return lay;
}

std::shared_ptr<const Layout> Layout::without_register(int reg) const {
    if (regs_[reg].kind == Kind::Edge)
        throw check_error("edge registers cannot be retired (edge id = register index)");
    auto lay = std::make_shared<Layout>();
    lay->regs_ = regs_;
    lay->regs_.erase(lay->regs_.begin() + reg);
    lay->num_edges_ = num_edges_;
    lay->assign_fields();
    return lay;
}

int Layout::find(Kind kind, int ref) const {
    for (int i = 0; i < num_registers(); ++i)
        if (regs_[i].kind == kind && regs_[i].ref == ref) return i;
    return -1;
}

int Layout::get(const Key& k, int reg) const {
    uint64_t word = word_[reg] == 0 ? k.w0 : k.w1;
    return static_cast<int>((word >> shift_[reg]) & ((1ull << width_[reg]) - 1));
}

void Layout::set(Key& k, int reg, int val) const {
    if (val < 0 || val >= regs_[reg].radix) throw check_error("register value out of range");
    uint64_t mask = ((1ull << width_[reg]) - 1) << shift_[reg];
    uint64_t& word = word_[reg] == 0 ? k.w0 : k.w1;
    word = (word & ~mask) | (static_cast<uint64_t>(val) << shift_[reg]);
}

bool Layout::prefix_of(const Layout& other) const {
    if (num_registers() > other.num_registers()) return false;
    for (int i = 0; i < num_registers(); ++i) {
        if (regs_[i].kind != other.regs_[i].kind || regs_[i].ref != other.regs_[i].ref ||
            regs_[i].radix != other.regs_[i].radix)
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// SparseState basics

double SparseState::norm2() const {
    double s = 0.0;
    for (const auto& [k, a] : amp) s += std::norm(a);
    return s;
}

SparseState SparseState::normalized() const {
    double n = std::sqrt(norm2());
    if (n == 0.0) throw check_error("cannot normalize the zero state");
    SparseState out{layout, amp};
    for (auto& [k, a] : out.amp) a /= n;
    return out;
}

SparseState make_basis_state(std::shared_ptr<const Layout> layout, const Key& k) {
    return SparseState{std::move(layout), {{k, cplx{1.0, 0.0}}}};
}

void canonicalize(SparseState& s) {
    std::stable_sort(s.amp.begin(), s.amp.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    size_t out = 0;
    for (size_t i = 0; i < s.amp.size();) {
        Key k = s.amp[i].first;
        cplx acc = 0.0;
        while (i < s.amp.size() && s.amp[i].first == k) acc += s.amp[i++].second;
        if (std::abs(acc) > PRUNE_EPS) s.amp[out++] = {k, acc};
    }
    s.amp.resize(out);
}

cplx inner(const SparseState& a, const SparseState& b) {
    if (a.layout.get() != b.layout.get() && !a.layout->prefix_of(*b.layout))
        throw check_error("inner product across incompatible layouts");
    cplx s = 0.0;
    size_t i = 0, j = 0;
    while (i < a.amp.size() && j < b.amp.size()) {
        if (a.amp[i].first < b.amp[j].first) ++i;
        else if (b.amp[j].first < a.amp[i].first) ++j;
        else s += std::conj(a.amp[i++].second) * b.amp[j++].second;
    }
    return s;
}

SparseState add(const SparseState& a, const SparseState& b, cplx cb) {
    SparseState out{a.layout, a.amp};
    out.amp.reserve(a.amp.size() + b.amp.size());
    for (const auto& [k, v] : b.amp) out.amp.push_back({k, cb * v});
    canonicalize(out);
    return out;
}

SparseState scaled(const SparseState& a, cplx c) {
    SparseState out{a.layout, a.amp};
    for (auto& [k, v] : out.amp) v *= c;
    return out;
}

double fidelity(const SparseState& a, const SparseState& b) {
    double na = std::sqrt(a.norm2()), nb = std::sqrt(b.norm2());
    if (na == 0.0 || nb == 0.0) throw check_error("fidelity with the zero state");
    return std::abs(inner(a, b)) / (na * nb);
}

// ---------------------------------------------------------------------------
// kernel application

namespace {

SparseState apply_kernel_impl(const SparseState& s, const std::vector<int>& regs,
                              const KernelFn& k, bool parallel) {
    const Layout& lay = *s.layout;
    size_t n = s.amp.size();
    // fixed chunking, independent of the worker count, so the concatenation
    // order (and thus floating-point summation order) never changes
    size_t chunk_count = std::min<size_t>(256, std::max<size_t>(n, 1));
    std::vector<std::vector<std::pair<Key, cplx>>> buckets(chunk_count);

    auto work = [&](size_t c) {
        size_t lo = n * c / chunk_count, hi = n * (c + 1) / chunk_count;
        auto& out = buckets[c];
        std::vector<int> vals(regs.size());
        for (size_t i = lo; i < hi; ++i) {
            const Key& key = s.amp[i].first;
            cplx a = s.amp[i].second;
            for (size_t r = 0; r < regs.size(); ++r) vals[r] = lay.get(key, regs[r]);
            k(vals, [&](const std::vector<int>& nv, cplx factor) {
                if (nv.size() != regs.size()) throw check_error("kernel emitted wrong arity");
                Key nk = key;
                for (size_t r = 0; r < regs.size(); ++r) lay.set(nk, regs[r], nv[r]);
                out.push_back({nk, a * factor});
            });
        }
    };

    if (parallel && threads() > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (long c = 0; c < static_cast<long>(chunk_count); ++c) work(c);
#else
        for (size_t c = 0; c < chunk_count; ++c) work(c);
#endif
    } else {
        for (size_t c = 0; c < chunk_count; ++c) work(c);
    }

    SparseState out{s.layout, {}};
    size_t total = 0;
    for (const auto& b : buckets) total += b.size();
    out.amp.reserve(total);
    for (auto& b : buckets) out.amp.insert(out.amp.end(), b.begin(), b.end());
    canonicalize(out);
    return out;
}

}  // namespace

SparseState apply_kernel(const SparseState& s, const std::vector<int>& regs, const KernelFn& k) {
    return apply_kernel_impl(s, regs, k, true);
}

SparseState apply_kernel_serial(const SparseState& s, const std::vector<int>& regs,
                                const KernelFn& k) {
    return apply_kernel_impl(s, regs, k, false);
}

SparseState apply_diag(const SparseState& s, const std::function<cplx(const Key&)>& phase) {
    SparseState out{s.layout, s.amp};
    for (auto& [k, a] : out.amp) a *= phase(k);
    // diagonal factors can still prune amplitudes to zero
    size_t w = 0;
    for (size_t i = 0; i < out.amp.size(); ++i)
        if (std::abs(out.amp[i].second) > PRUNE_EPS) out.amp[w++] = out.amp[i];
    out.amp.resize(w);
    return out;
}

SparseState rotate_register(const SparseState& s, int reg,
                            const std::vector<std::vector<cplx>>& u) {
    int d = s.layout->reg(reg).radix;
    if (static_cast<int>(u.size()) != d) throw check_error("rotation matrix has wrong size");
    return apply_kernel(s, {reg}, [&u, d](const std::vector<int>& v, const EmitFn& emit) {
        for (int nu = 0; nu < d; ++nu) {
            if (std::abs(u[nu][v[0]]) > 0.0) emit({nu}, u[nu][v[0]]);
        }
    });
}

// ---------------------------------------------------------------------------
// measurement

int measure_value(SparseState& s, const std::function<int(const Key&)>& fn, Rng& rng,
                  double* prob_out) {
    std::map<int, double> probs;
    for (const auto& [k, a] : s.amp) probs[fn(k)] += std::norm(a);
    std::vector<int> outcomes;
    std::vector<double> weights;
    for (const auto& [o, p] : probs) {
        outcomes.push_back(o);
        weights.push_back(p);
    }
    size_t pick = rng.sample(weights);
    int outcome = outcomes[pick];
    double total = 0.0;
    for (double w : weights) total += w;
    if (prob_out) *prob_out = weights[pick] / total;

    std::vector<std::pair<Key, cplx>> kept;
    for (const auto& [k, a] : s.amp)
        if (fn(k) == outcome) kept.push_back({k, a});
    s.amp = std::move(kept);
    double nrm = std::sqrt(s.norm2());
    for (auto& [k, a] : s.amp) a /= nrm;
    return outcome;
}

int measure_family(SparseState& s,
                   const std::vector<std::function<SparseState(const SparseState&)>>& projectors,
                   Rng& rng, double* prob_out) {
    std::vector<SparseState> branches;
    std::vector<double> weights;
    branches.reserve(projectors.size());
    for (const auto& p : projectors) {
        branches.push_back(p(s));
        weights.push_back(branches.back().norm2());
    }
    double total = 0.0;
    for (double w : weights) total += w;
    if (std::abs(total - s.norm2()) > 1e-9 * std::max(1.0, s.norm2()))
        throw check_error("projective family is not complete on this state");
    size_t pick = rng.sample(weights);
    if (prob_out) *prob_out = weights[pick] / total;
    s = branches[pick].normalized();
    return static_cast<int>(pick);
}

// ---------------------------------------------------------------------------
// register management

SparseState extended(const SparseState& s, std::shared_ptr<const Layout> bigger,
                     const std::function<void(const Key&, Key&)>& init_new) {
    if (!s.layout->prefix_of(*bigger))
        throw check_error("extension target does not contain the current layout as a prefix");
    SparseState out{bigger, {}};
    out.amp.reserve(s.amp.size());
    for (const auto& [k, a] : s.amp) {
        Key nk = k;
        if (init_new) init_new(k, nk);
        out.amp.push_back({nk, a});
    }
    canonicalize(out);
    return out;
}

SparseState with_new_register(const SparseState& s, std::shared_ptr<const Layout> bigger,
                              int new_reg, const std::vector<cplx>& init) {
    if (!s.layout->prefix_of(*bigger) || bigger->num_registers() != s.layout->num_registers() + 1)
        throw check_error("with_new_register expects exactly one appended register");
    int d = bigger->reg(new_reg).radix;
    if (static_cast<int>(init.size()) != d) throw check_error("ancilla init vector has wrong size");
    SparseState out{bigger, {}};
    out.amp.reserve(s.amp.size() * d);
    for (const auto& [k, a] : s.amp) {
        for (int v = 0; v < d; ++v) {
            if (std::abs(init[v]) <= PRUNE_EPS) continue;
            Key nk = k;
            bigger->set(nk, new_reg, v);
            out.amp.push_back({nk, a * init[v]});
        }
    }
    canonicalize(out);
    return out;
}

SparseState contract_register(const SparseState& s, int reg, const std::vector<cplx>& known) {
    auto smaller = s.layout->without_register(reg);
    int d = s.layout->reg(reg).radix;
    if (static_cast<int>(known.size()) != d)
        throw check_error("contraction vector has wrong size");
    // project onto |known> and repack keys without the register
    SparseState out{smaller, {}};
    out.amp.reserve(s.amp.size());
    for (const auto& [k, a] : s.amp) {
        int v = s.layout->get(k, reg);
        cplx coeff = std::conj(known[v]) * a;
        if (std::abs(coeff) <= PRUNE_EPS) continue;
        Key nk{};
        int nr = 0;
        for (int r = 0; r < s.layout->num_registers(); ++r) {
            if (r == reg) continue;
            smaller->set(nk, nr++, s.layout->get(k, r));
        }
        out.amp.push_back({nk, coeff});
    }
    canonicalize(out);
    if (std::abs(out.norm2() - s.norm2()) > 1e-10 * std::max(1.0, s.norm2()))
        throw check_error("register is not in the expected product state");
    return out;
}

uint64_t state_checksum(const SparseState& s) {
    std::string bytes = "R" + std::to_string(s.layout->num_registers()) + ";";
    for (const auto& [k, a] : s.amp) {
        bytes += format_hex64(k.w0);
        bytes += format_hex64(k.w1);
        bytes += format_double(a.real());
        bytes += ",";
        bytes += format_double(a.imag());
        bytes += ";";
    }
    return fnv1a(bytes);
}

}  // namespace anyonprep
