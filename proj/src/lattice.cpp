#include "lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace anyonprep {

namespace {
double angle_of(const Vec2& v) { return std::atan2(v.y, v.x); }
}  // namespace

std::vector<std::pair<int, bool>> Lattice::vertex_star(int v) const {
    return vertices_[v].star;
}

void Lattice::sort_stars() {
    for (auto& v : vertices_) v.star.clear();
    for (int e = 0; e < num_edges(); ++e) {
        vertices_[edges_[e].from].star.push_back({e, true});
        vertices_[edges_[e].to].star.push_back({e, false});
    }
    for (auto& v : vertices_) {
        std::sort(v.star.begin(), v.star.end(), [&](const auto& a, const auto& b) {
            Vec2 da = edges_[a.first].dir, db = edges_[b.first].dir;
            if (!a.second) da = {-da.x, -da.y};
            if (!b.second) db = {-db.x, -db.y};
            double aa = angle_of(da), ab = angle_of(db);
            if (aa != ab) return aa < ab;
            return a < b;
        });
    }
}

// Trace faces with the interior on the left of the walk: from a directed edge
// arriving at v, continue along the directed edge that precedes the reversed
// arrival direction in ccw angular order around v (first one clockwise from
// the reverse). That makes every corner a left turn, so walks run ccw.
void Lattice::trace_faces() {
    faces_.clear();
    for (auto& e : edges_) e.left_face = e.right_face = -1;
    // directed edge key: 2*e + (forward ? 0 : 1)
    std::vector<char> used(2 * edges_.size(), 0);
    for (size_t start = 0; start < 2 * edges_.size(); ++start) {
        if (used[start]) continue;
        Face f;
        size_t cur = start;
        while (!used[cur]) {
            used[cur] = 1;
            int e = static_cast<int>(cur / 2);
            bool fwd = cur % 2 == 0;
            f.edge.push_back(e);
            f.along.push_back(fwd ? 1 : 0);
            f.vertex.push_back(fwd ? edges_[e].from : edges_[e].to);
            int head = fwd ? edges_[e].to : edges_[e].from;
            // find the reverse directed edge in head's angular star
            const auto& star = vertices_[head].star;
            size_t pos = star.size();
            for (size_t i = 0; i < star.size(); ++i) {
                if (star[i].first == e && star[i].second == !fwd) {
                    pos = i;
                    break;
                }
            }
            if (pos == star.size()) throw check_error("face tracing lost an edge");
            auto [ne, nfwd] = star[(pos + star.size() - 1) % star.size()];
            cur = 2 * static_cast<size_t>(ne) + (nfwd ? 0 : 1);
        }
        // rotate the walk so the smallest (edge, along) starts it
        size_t best = 0;
        for (size_t i = 1; i < f.edge.size(); ++i)
            if (std::pair(f.edge[i], f.along[i]) < std::pair(f.edge[best], f.along[best])) best = i;
        std::rotate(f.edge.begin(), f.edge.begin() + best, f.edge.end());
        std::rotate(f.along.begin(), f.along.begin() + best, f.along.end());
        std::rotate(f.vertex.begin(), f.vertex.begin() + best, f.vertex.end());
        int id = static_cast<int>(faces_.size());
        for (size_t i = 0; i < f.edge.size(); ++i) {
            if (f.along[i])
                edges_[f.edge[i]].left_face = id;
            else
                edges_[f.edge[i]].right_face = id;
        }
        faces_.push_back(std::move(f));
    }
}

Lattice Lattice::honeycomb_torus(int lx, int ly) {
    if (lx < 2 || ly < 2) throw validation_error("honeycomb torus needs lx, ly >= 2");
    Lattice lat;
    lat.lx_ = lx;
    lat.ly_ = ly;
    const Vec2 a1{1.0, 0.0}, a2{0.5, std::sqrt(3.0) / 2.0};
    const Vec2 delta{0.5, 0.5 / std::sqrt(3.0)};
    auto vid = [&](int x, int y, int s) {
        x = ((x % lx) + lx) % lx;
        y = ((y % ly) + ly) % ly;
        return ((y * lx) + x) * 2 + s;
    };
    lat.vertices_.resize(static_cast<size_t>(2 * lx * ly));
    for (int y = 0; y < ly; ++y)
        for (int x = 0; x < lx; ++x) {
            Vec2 a{x * a1.x + y * a2.x, x * a1.y + y * a2.y};
            lat.vertices_[vid(x, y, 0)].pos = a;
            lat.vertices_[vid(x, y, 1)].pos = {a.x + delta.x, a.y + delta.y};
        }
    // all edges oriented from sublattice A to sublattice B
    for (int y = 0; y < ly; ++y)
        for (int x = 0; x < lx; ++x) {
            Edge e0{vid(x, y, 0), vid(x, y, 1), delta, -1, -1};
            Edge e1{vid(x, y, 0), vid(x - 1, y, 1), {delta.x - a1.x, delta.y - a1.y}, -1, -1};
            Edge e2{vid(x, y, 0), vid(x, y - 1, 1), {delta.x - a2.x, delta.y - a2.y}, -1, -1};
            lat.edges_.push_back(e0);
            lat.edges_.push_back(e1);
            lat.edges_.push_back(e2);
        }
    lat.sort_stars();
    lat.trace_faces();
    if (lat.num_faces() != lx * ly) throw check_error("honeycomb tracing produced wrong face count");
    return lat;
}

std::vector<Lattice::Corner> Lattice::corners(int f) const {
    const Face& face = faces_[f];
    int n = static_cast<int>(face.edge.size());
    std::vector<Corner> out;
    out.reserve(n);
    for (int j = 0; j < n; ++j) {
        int prev = (j + n - 1) % n;
        Corner c{};
        c.vertex = face.vertex[j];
        c.in_edge = face.edge[prev];
        c.in_along = face.along[prev] != 0;
        c.out_edge = face.edge[j];
        c.out_along = face.along[j] != 0;
        c.leg_edge = -1;
        for (auto [e, outgoing] : vertices_[c.vertex].star) {
            if (e != c.in_edge && e != c.out_edge) {
                c.leg_edge = e;
                c.leg_outward = outgoing;
            }
        }
        if (c.leg_edge < 0) throw check_error("corner vertex is not trivalent");
        c.tail_corner = c.leg_edge == face.tail_edge;
        out.push_back(c);
    }
    return out;
}

Lattice Lattice::with_tail(int f, int* tail_edge_out) const {
    Lattice lat = *this;
    Face& face = lat.faces_[f];
    if (face.tail_edge >= 0) throw validation_error("face already has a tail");
    int host = face.edge[0];
    bool along = face.along[0] != 0;
    const Edge he = lat.edges_[host];  // copy; edge vector reallocates below
    if (he.left_face == he.right_face)
        throw check_error("tail host edge borders the same face twice");
    int u = he.from, w = he.to;
    int vt = lat.num_vertices();
    int punct = vt + 1;
    lat.vertices_.push_back({});
    lat.vertices_.push_back({});
    lat.vertices_[vt].pos = {vertices_[u].pos.x + 0.5 * he.dir.x,
                             vertices_[u].pos.y + 0.5 * he.dir.y};
    lat.vertices_[punct].puncture = true;
    // host edge keeps its id for the first half u->vt; second half vt->w is new
    int e2 = lat.num_edges();
    Vec2 half{0.5 * he.dir.x, 0.5 * he.dir.y};
    lat.edges_.push_back({vt, w, half, he.left_face, he.right_face});
    lat.edges_[host].to = vt;
    lat.edges_[host].dir = half;
    // the tail points inward: rotate the walk direction by +90 degrees (the
    // face interior is on the left of the ccw walk)
    int et = lat.num_edges();
    Vec2 wdir = along ? half : Vec2{-half.x, -half.y};
    Vec2 tdir{-wdir.y, wdir.x};
    lat.edges_.push_back({vt, punct, tdir, f, f});
    lat.vertices_[punct].pos = {lat.vertices_[vt].pos.x + tdir.x,
                                lat.vertices_[vt].pos.y + tdir.y};

    // splice the split segments into the two adjacent face walks
    auto splice = [&](Face& fc) {
        for (size_t j = 0; j < fc.edge.size(); ++j) {
            if (fc.edge[j] != host) continue;
            if (fc.along[j]) {
                // walk u -> w becomes [host: u->vt, e2: vt->w]
                fc.edge.insert(fc.edge.begin() + j + 1, e2);
                fc.along.insert(fc.along.begin() + j + 1, 1);
                fc.vertex.insert(fc.vertex.begin() + j + 1, vt);
            } else {
                // walk w -> u becomes [e2: w->vt, host: vt->u]
                fc.edge.insert(fc.edge.begin() + j, e2);
                fc.along.insert(fc.along.begin() + j + 1, 0);
                fc.vertex.insert(fc.vertex.begin() + j + 1, vt);
            }
            return true;
        }
        return false;
    };
    int f2 = he.left_face == f ? he.right_face : he.left_face;
    if (!splice(lat.faces_[f])) throw check_error("tail host edge not on host face");
    if (f2 != f && !splice(lat.faces_[f2])) throw check_error("tail host edge not on neighbor face");
    lat.faces_[f].tail_edge = et;
    lat.sort_stars();
    // sort_stars cleared nothing else; left/right faces were maintained by hand
    if (tail_edge_out) *tail_edge_out = et;
    return lat;
}

std::vector<Lattice::Crossing> Lattice::dual_path(int f0, int f1) const {
    if (f0 == f1) return {};
    std::vector<int> prev_face(num_faces(), -1), prev_edge(num_faces(), -1);
    std::deque<int> queue{f0};
    prev_face[f0] = f0;
    while (!queue.empty()) {
        int f = queue.front();
        queue.pop_front();
        if (f == f1) break;
        for (int e = 0; e < num_edges(); ++e) {
            const Edge& ed = edges_[e];
            int g = -1;
            if (ed.left_face == f) g = ed.right_face;
            else if (ed.right_face == f) g = ed.left_face;
            if (g < 0 || g == f || prev_face[g] >= 0) continue;
            prev_face[g] = f;
            prev_edge[g] = e;
            queue.push_back(g);
        }
    }
    if (prev_face[f1] < 0) throw check_error("dual graph is disconnected");
    std::vector<Crossing> path;
    for (int f = f1; f != f0; f = prev_face[f]) {
        int e = prev_edge[f];
        path.push_back({e, prev_face[f], f, edges_[e].left_face == prev_face[f]});
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<Lattice::Crossing> Lattice::dual_path_through(const std::vector<int>& fs) const {
    if (fs.size() < 2) throw validation_error("path needs at least two faces");
    std::vector<Crossing> path;
    for (size_t i = 0; i + 1 < fs.size(); ++i) {
        auto leg = dual_path(fs[i], fs[i + 1]);
        path.insert(path.end(), leg.begin(), leg.end());
    }
    return path;
}

int Lattice::dual_distance(int f0, int f1) const {
    return static_cast<int>(dual_path(f0, f1).size());
}

std::vector<std::pair<int, int>> Lattice::pair_greedy(std::vector<int> faces,
                                                      std::vector<int>* leftover) const {
    std::vector<std::pair<int, int>> pairs;
    std::sort(faces.begin(), faces.end());
    while (faces.size() >= 2) {
        int bi = -1, bj = -1, bd = -1;
        for (size_t i = 0; i < faces.size(); ++i)
            for (size_t j = i + 1; j < faces.size(); ++j) {
                int d = dual_distance(faces[i], faces[j]);
                if (bd < 0 || d < bd) {
                    bd = d;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        pairs.push_back({faces[bi], faces[bj]});
        faces.erase(faces.begin() + bj);
        faces.erase(faces.begin() + bi);
    }
    if (leftover) *leftover = faces;
    else if (!faces.empty())
        throw check_error("greedy pairing left unmatched faces");
    return pairs;
}

Lattice::Region Lattice::analyze_region(const std::vector<int>& faces) const {
    Region r;
    r.faces = faces;
    std::sort(r.faces.begin(), r.faces.end());
    r.faces.erase(std::unique(r.faces.begin(), r.faces.end()), r.faces.end());
    std::set<int> in(r.faces.begin(), r.faces.end());
    for (int f : r.faces)
        if (f < 0 || f >= num_faces()) throw validation_error("region face out of range");

    std::set<int> touched_edges, touched_vertices, inner_v;
    for (int e = 0; e < num_edges(); ++e) {
        const Edge& ed = edges_[e];
        bool l = in.count(ed.left_face), rt = in.count(ed.right_face);
        if (l || rt) {
            touched_edges.insert(e);
            touched_vertices.insert(ed.from);
            touched_vertices.insert(ed.to);
        }
        if (l && rt && ed.left_face != ed.right_face) {
            r.interior_edges.push_back(e);
            inner_v.insert(ed.from);
            inner_v.insert(ed.to);
        }
    }
    r.inner_vertices.assign(inner_v.begin(), inner_v.end());
    for (int f : r.faces) {
        bool deep = true;
        for (int e : faces_[f].edge) {
            const Edge& ed = edges_[e];
            if (!in.count(ed.left_face) || !in.count(ed.right_face) ||
                ed.left_face == ed.right_face)
                deep = false;
        }
        if (deep) r.deep_faces.push_back(f);
    }

    // connectivity in the dual
    if (!r.faces.empty()) {
        std::set<int> seen{r.faces[0]};
        std::deque<int> queue{r.faces[0]};
        while (!queue.empty()) {
            int f = queue.front();
            queue.pop_front();
            for (int e : faces_[f].edge) {
                const Edge& ed = edges_[e];
                int g = ed.left_face == f ? ed.right_face : ed.left_face;
                if (in.count(g) && !seen.count(g)) {
                    seen.insert(g);
                    queue.push_back(g);
                }
            }
        }
        r.connected = seen.size() == r.faces.size();
    }
    // Euler characteristic of the closed region: 1 for a disk
    long chi = static_cast<long>(touched_vertices.size()) -
               static_cast<long>(touched_edges.size()) + static_cast<long>(r.faces.size());
    r.disk = r.connected && chi == 1;

    // spanning tree over (inner_vertices, interior_edges)
    if (!r.inner_vertices.empty()) {
        r.tree_root = r.inner_vertices.front();
        std::deque<int> queue{r.tree_root};
        std::set<int> seen{r.tree_root};
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int e : r.interior_edges) {
                const Edge& ed = edges_[e];
                int u = ed.from == v ? ed.to : ed.to == v ? ed.from : -1;
                if (u < 0 || seen.count(u)) continue;
                seen.insert(u);
                r.tree_parent_edge[u] = e;
                r.tree_parent_vertex[u] = v;
                queue.push_back(u);
            }
        }
        if (seen.size() != r.inner_vertices.size())
            r.connected = false;  // interior graph split; caller decides severity
    }
    return r;
}

std::vector<int> Lattice::parse_face_list(const std::string& spec) const {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        int f;
        try {
            f = std::stoi(tok);
        } catch (...) {
            throw validation_error("bad face index '" + tok + "' in '" + spec + "'");
        }
        if (f < 0 || f >= num_faces())
            throw validation_error("face index " + tok + " out of range (0.." +
                                   std::to_string(num_faces() - 1) + ")");
        out.push_back(f);
    }
    if (out.empty()) throw validation_error("empty face list '" + spec + "'");
    return out;
}

}  // namespace anyonprep
