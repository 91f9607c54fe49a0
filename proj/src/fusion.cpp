#include "fusion.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace anyonprep {

using nlohmann::json;

void FusionCategory::rebuild_tables() {
    int n = num_objects();
    fuse_.assign(static_cast<size_t>(n) * n, {});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (n_[idx(a, b, c)]) fuse_[a * n + b].push_back(c);
}

int FusionCategory::object_index(const std::string& nm) const {
    for (int a = 0; a < num_objects(); ++a)
        if (names_[a] == nm) return a;
    throw validation_error("unknown object name '" + nm + "' in category " + name_);
}

double FusionCategory::total_dim2() const {
    double s = 0.0;
    for (double d : qdim_) s += d * d;
    return s;
}

bool FusionCategory::f_admissible(int a, int b, int c, int d, int e, int f) const {
    return n(a, b, e) && n(e, c, d) && n(b, c, f) && n(a, f, d);
}

cplx FusionCategory::F(int a, int b, int c, int d, int e, int f) const {
    if (!f_admissible(a, b, c, d, e, f)) return {0.0, 0.0};
    auto it = f_.find(FKey{a, b, c, d, e, f});
    return it == f_.end() ? cplx{1.0, 0.0} : it->second;
}

std::vector<int> FusionCategory::sector_objects(int lv, int g) const {
    const GradingLevel& L = levels_.at(lv - 1);
    std::vector<int> out;
    for (int a = 0; a < num_objects(); ++a)
        if (L.sector[a] == g) out.push_back(a);
    return out;
}

int FusionCategory::sector_of(int lv, int a) const {
    int g = levels_.at(lv - 1).sector.at(a);
    if (g < 0)
        throw check_error("object " + names_[a] + " not in level " + std::to_string(lv) +
                          " of category " + name_);
    return g;
}

double FusionCategory::trivial_sector_dim2(int lv) const {
    double s = 0.0;
    for (int a : sector_objects(lv, 0)) s += qdim_[a] * qdim_[a];
    return s;
}

// ---------------------------------------------------------------------------
// builtins

FusionCategory FusionCategory::vec_zn(int n) {
    if (n < 1) throw validation_error("vec_zn needs n >= 1");
    FusionCategory cat;
    cat.name_ = "vec_z" + std::to_string(n);
    for (int a = 0; a < n; ++a) cat.names_.push_back(std::to_string(a));
    cat.dual_.resize(n);
    cat.qdim_.assign(n, 1.0);
    cat.n_.assign(static_cast<size_t>(n) * n * n, 0);
    for (int a = 0; a < n; ++a) {
        cat.dual_[a] = (n - a) % n;
        for (int b = 0; b < n; ++b) cat.n_[cat.idx(a, b, (a + b) % n)] = 1;
    }
    GradingLevel lvl{AbelianGroup({n}), {}};
    lvl.sector.resize(n);
    for (int a = 0; a < n; ++a) lvl.sector[a] = a;
    cat.levels_.push_back(std::move(lvl));
    cat.rebuild_tables();
    return cat;
}

FusionCategory FusionCategory::ising() {
    FusionCategory cat;
    cat.name_ = "ising";
    cat.names_ = {"1", "psi", "sigma"};
    cat.dual_ = {0, 1, 2};
    cat.qdim_ = {1.0, 1.0, std::sqrt(2.0)};
    const int I = 0, P = 1, S = 2;
    cat.n_.assign(27, 0);
    auto set = [&](int a, int b, int c) { cat.n_[cat.idx(a, b, c)] = 1; };
    set(I, I, I); set(I, P, P); set(P, I, P); set(P, P, I);
    set(I, S, S); set(S, I, S); set(P, S, S); set(S, P, S);
    set(S, S, I); set(S, S, P);
    // Nontrivial F-symbols in the standard (Kitaev) gauge. Everything else
    // admissible is 1.
    double r = 1.0 / std::sqrt(2.0);
    cat.f_[{S, S, S, S, I, I}] = r;
    cat.f_[{S, S, S, S, I, P}] = r;
    cat.f_[{S, S, S, S, P, I}] = r;
    cat.f_[{S, S, S, S, P, P}] = -r;
    cat.f_[{P, S, P, S, S, S}] = -1.0;
    cat.f_[{S, P, S, P, S, S}] = -1.0;
    GradingLevel l1{AbelianGroup({2}), {0, 1, -1}};
    GradingLevel l2{AbelianGroup({2}), {0, 0, 1}};
    cat.levels_ = {l1, l2};
    cat.rebuild_tables();
    return cat;
}

FusionCategory FusionCategory::ty_z3() {
    FusionCategory cat;
    cat.name_ = "ty_z3";
    cat.names_ = {"0", "1", "2", "sigma"};
    cat.dual_ = {0, 2, 1, 3};
    double rt3 = std::sqrt(3.0);
    cat.qdim_ = {1.0, 1.0, 1.0, rt3};
    const int S = 3;
    cat.n_.assign(64, 0);
    auto set = [&](int a, int b, int c) { cat.n_[cat.idx(a, b, c)] = 1; };
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) set(a, b, (a + b) % 3);
        set(a, S, S); set(S, a, S); set(S, S, (3 - a) % 3);
    }
    // L3(S, S, 0) etc. covered above: sigma x sigma = 0 + 1 + 2.
    auto omega_pow = [](int k) {
        double ph = 2.0 * std::numbers::pi * ((k % 3 + 3) % 3) / 3.0;
        return cplx{std::cos(ph), std::sin(ph)};
    };
    // Tambara-Yamagami data for Z3 with the symmetric pairing chi(a,b) = w^{ab}
    // and tau = +1/sqrt(3):
    //   [F^{a sigma b}_sigma] = chi(a,b)     [F^{sigma a sigma}_b] = chi(a,b)
    //   [F^{sigma sigma sigma}_sigma]_{ab} = conj(chi(a,b))/sqrt(3)
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            if ((a * b) % 3 != 0) {
                cat.f_[{a, S, b, S, S, S}] = omega_pow(a * b);
                cat.f_[{S, a, S, b, S, S}] = omega_pow(a * b);
            }
            cat.f_[{S, S, S, S, a, b}] = omega_pow(-a * b) / rt3;
        }
    }
    GradingLevel l1{AbelianGroup({3}), {0, 1, 2, -1}};
    GradingLevel l2{AbelianGroup({2}), {0, 0, 0, 1}};
    cat.levels_ = {l1, l2};
    cat.rebuild_tables();
    return cat;
}

FusionCategory FusionCategory::named(const std::string& name) {
    if (std::filesystem::exists(name)) {
        std::ifstream in(name);
        std::stringstream ss;
        ss << in.rdbuf();
        auto cat = from_json_text(ss.str());
        cat.validate();
        return cat;
    }
    if (name == "ising") return ising();
    if (name == "ty_z3") return ty_z3();
    if (name.rfind("vec_z", 0) == 0) {
        int n = std::stoi(name.substr(5));
        return vec_zn(n);
    }
    throw validation_error("unknown category '" + name + "' (not a builtin, not a file)");
}

// ---------------------------------------------------------------------------
// JSON

FusionCategory FusionCategory::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("category file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "fusion-category/1")
            throw validation_error("unsupported category format tag");
        FusionCategory cat;
        cat.name_ = j.at("name").get<std::string>();
        cat.names_ = j.at("objects").get<std::vector<std::string>>();
        cat.dual_ = j.at("dual").get<std::vector<int>>();
        cat.qdim_ = j.at("qdim").get<std::vector<double>>();
        int n = cat.num_objects();
        if (static_cast<int>(cat.dual_.size()) != n || static_cast<int>(cat.qdim_.size()) != n)
            throw validation_error("dual/qdim length does not match object count");
        cat.n_.assign(static_cast<size_t>(n) * n * n, 0);
        for (const auto& t : j.at("fusion")) {
            int a = t.at(0), b = t.at(1), c = t.at(2);
            if (a < 0 || a >= n || b < 0 || b >= n || c < 0 || c >= n)
                throw validation_error("fusion triple out of range");
            cat.n_[cat.idx(a, b, c)] = 1;
        }
        if (j.contains("F")) {
            for (const auto& t : j.at("F")) {
                FKey k{t.at(0), t.at(1), t.at(2), t.at(3), t.at(4), t.at(5)};
                for (int v : k)
                    if (v < 0 || v >= n) throw validation_error("F entry index out of range");
                cat.f_[k] = cplx(t.at(6).get<double>(), t.at(7).get<double>());
            }
        }
        for (const auto& lv : j.at("series")) {
            GradingLevel L{AbelianGroup::parse(lv.at("group").get<std::string>()),
                           lv.at("sector").get<std::vector<int>>()};
            if (static_cast<int>(L.sector.size()) != n)
                throw validation_error("series sector length does not match object count");
            cat.levels_.push_back(std::move(L));
        }
        cat.rebuild_tables();
        return cat;
    } catch (const json::exception& e) {
        throw validation_error(std::string("category file missing field: ") + e.what());
    }
}

std::string FusionCategory::to_json_text() const {
    json j;
    j["format"] = "fusion-category/1";
    j["name"] = name_;
    j["objects"] = names_;
    j["dual"] = dual_;
    j["qdim"] = qdim_;
    json fus = json::array();
    int n = num_objects();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (n_[idx(a, b, c)]) fus.push_back({a, b, c});
    j["fusion"] = fus;
    json fs = json::array();
    for (const auto& [k, v] : f_) {
        fs.push_back({k[0], k[1], k[2], k[3], k[4], k[5], v.real(), v.imag()});
    }
    j["F"] = fs;
    json series = json::array();
    for (const auto& L : levels_) {
        series.push_back({{"group", L.group.name()}, {"sector", L.sector}});
    }
    j["series"] = series;
    return j.dump(2) + "\n";
}

uint64_t FusionCategory::checksum() const {
    std::string s = "fusion-category/1\n" + name_ + "\n";
    for (const auto& nm : names_) s += nm + ";";
    s += "\n";
    for (int d : dual_) s += std::to_string(d) + ";";
    s += "\n";
    for (double d : qdim_) s += format_double(d) + ";";
    s += "\n";
    int n = num_objects();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (n_[idx(a, b, c)])
                    s += std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ";";
    s += "\n";
    for (const auto& [k, v] : f_) {
        for (int x : k) s += std::to_string(x) + ",";
        s += format_double(v.real()) + "," + format_double(v.imag()) + ";";
    }
    s += "\n";
    for (const auto& L : levels_) {
        s += L.group.name() + ":";
        for (int g : L.sector) s += std::to_string(g) + ",";
        s += ";";
    }
    return fnv1a(s);
}

// ---------------------------------------------------------------------------
// validation

void FusionCategory::validate() const {
    int n = num_objects();
    if (n == 0) throw check_error("category has no objects");
    auto fail = [&](const std::string& msg) { throw check_error(name_ + ": " + msg); };

    // unit, duals, dimensions
    if (dual_[0] != 0) fail("unit must be self-dual");
    if (std::abs(qdim_[0] - 1.0) > TOL_ALGEBRA) fail("unit must have dimension 1");
    for (int a = 0; a < n; ++a) {
        if (dual_[a] < 0 || dual_[a] >= n || dual_[dual_[a]] != a) fail("dual is not an involution");
        if (qdim_[a] <= 0.0) fail("quantum dimensions must be positive");
        if (std::abs(qdim_[a] - qdim_[dual_[a]]) > TOL_ALGEBRA) fail("dim(a) != dim(dual a)");
        for (int b = 0; b < n; ++b) {
            if (this->n(0, a, b) != (a == b) || this->n(a, 0, b) != (a == b))
                fail("unit fusion is not the identity");
            if (this->n(a, b, 0) != (b == dual_[a])) fail("N_{ab}^1 != delta_{b,dual a}");
            for (int c = 0; c < n; ++c) {
                if (this->n(a, b, c) != this->n(b, a, c))
                    fail("fusion rules must be commutative");
                // Frobenius reciprocity
                if (this->n(a, b, c) != this->n(dual_[c], a, dual_[b]))
                    fail("fusion fails Frobenius reciprocity");
            }
        }
    }
    // associativity of fusion numbers and dimension additivity
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                for (int d = 0; d < n; ++d) {
                    int lhs = 0, rhs = 0;
                    for (int e = 0; e < n; ++e) {
                        lhs += this->n(a, b, e) && this->n(e, c, d) ? 1 : 0;
                        rhs += this->n(b, c, e) && this->n(a, e, d) ? 1 : 0;
                    }
                    if (lhs != rhs) fail("fusion numbers are not associative");
                }
            }
            double s = 0.0;
            for (int c : fuse(a, b)) s += qdim_[c];
            if (std::abs(s - qdim_[a] * qdim_[b]) > TOL_ALGEBRA)
                fail("quantum dimensions do not respect fusion");
        }

    // stored F entries must be admissible; unit entries must stay 1
    for (const auto& [k, v] : f_) {
        if (!f_admissible(k[0], k[1], k[2], k[3], k[4], k[5])) fail("stored F entry inadmissible");
        if ((k[0] == 0 || k[1] == 0 || k[2] == 0) && std::abs(v - cplx{1.0, 0.0}) > TOL_ALGEBRA)
            fail("F with a unit slot must equal 1");
    }

    // F-matrix unitarity, blockwise over (e,f)
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    std::vector<int> es, fs_;
                    for (int e = 0; e < n; ++e)
                        if (this->n(a, b, e) && this->n(e, c, d)) es.push_back(e);
                    for (int f = 0; f < n; ++f)
                        if (this->n(b, c, f) && this->n(a, f, d)) fs_.push_back(f);
                    if (es.size() != fs_.size()) fail("F block is not square");
                    for (size_t i = 0; i < es.size(); ++i)
                        for (size_t j = 0; j < es.size(); ++j) {
                            cplx s = 0.0;
                            for (int f : fs_)
                                s += F(a, b, c, d, es[i], f) * std::conj(F(a, b, c, d, es[j], f));
                            cplx want = i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
                            if (std::abs(s - want) > TOL_ALGEBRA) fail("F block is not unitary");
                        }
                }

    // pentagon:
    //   [F^{xcd}_e]_{yz} [F^{abz}_e]_{xw} =
    //       sum_u [F^{abc}_y]_{xu} [F^{aud}_e]_{yw} [F^{bcd}_w]_{uz}
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    for (int x : fuse(a, b))
                        for (int y : fuse(x, c))
                            for (int e : fuse(y, d))
                                for (int z : fuse(c, d))
                                    for (int w : fuse(b, z)) {
                                        if (!this->n(a, w, e)) continue;
                                        cplx lhs = F(x, c, d, e, y, z) * F(a, b, z, e, x, w);
                                        cplx rhs = 0.0;
                                        for (int u = 0; u < n; ++u)
                                            rhs += F(a, b, c, y, x, u) * F(a, u, d, e, y, w) *
                                                   F(b, c, d, w, u, z);
                                        if (std::abs(lhs - rhs) > TOL_ALGEBRA)
                                            fail("pentagon identity fails");
                                    }

    // grading series
    if (levels_.empty()) fail("category needs at least one grading level");
    for (int lv = 1; lv <= num_levels(); ++lv) {
        const GradingLevel& L = levels_[lv - 1];
        if (static_cast<int>(L.sector.size()) != n) fail("grading sector table has wrong length");
        for (int a = 0; a < n; ++a) {
            if (L.sector[a] >= L.group.order()) fail("grading sector out of range");
            if (lv == num_levels() && L.sector[a] < 0) fail("last level must cover all objects");
            if (L.sector[a] >= 0 && L.sector[dual_[a]] != L.group.neg(L.sector[a]))
                fail("grading does not respect duals");
        }
        // members closed under fusion, and grading additive
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (L.sector[a] < 0 || L.sector[b] < 0) continue;
                for (int c : fuse(a, b))
                    if (L.sector[c] != L.group.add(L.sector[a], L.sector[b]))
                        fail("grading is not additive under fusion");
            }
        // trivial sector = previous level's members (or just the unit for lv 1)
        for (int a = 0; a < n; ++a) {
            bool in_triv = L.sector[a] == 0;
            bool in_prev = lv == 1 ? a == 0 : levels_[lv - 2].sector[a] >= 0;
            if (in_triv != in_prev) fail("trivial sector must equal the previous level");
        }
        // sector dimensions balance (faithful grading)
        double d0 = trivial_sector_dim2(lv);
        for (int g = 1; g < L.group.order(); ++g) {
            double dg = 0.0;
            for (int a : sector_objects(lv, g)) dg += qdim_[a] * qdim_[a];
            if (std::abs(dg - d0) > TOL_ALGEBRA) fail("graded sectors have unequal total dimension");
        }
    }
}

}  // namespace anyonprep
