#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"

namespace anyonprep {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

// Trivalent lattice on a torus (honeycomb), with optional tails hanging into
// punctured faces. Edges are oriented; faces are traced with the interior on
// the left, so face walks run counterclockwise.
//
// Register convention: edge ids double as state register indices. Materializing
// a tail appends new edges (and keeps existing ids stable), so states taken on
// the smaller lattice embed unchanged.
class Lattice {
  public:
    struct Edge {
        int from = -1, to = -1;
        Vec2 dir;                       // to - from, shortest torus representative
        int left_face = -1, right_face = -1;
    };
    struct Face {
        std::vector<int> edge;      // boundary segments in ccw walk order
        std::vector<char> along;    // walk direction matches edge orientation
        std::vector<int> vertex;    // vertex[j] = start vertex of segment j
        int tail_edge = -1;         // tail hanging into this face, if any
    };
    // One corner of a face walk: the walk enters vertex along in_edge and
    // leaves along out_edge; leg_edge is the third incident edge.
    // leg_outward says the leg's global orientation points away from the
    // vertex. tail_corner marks the corner whose leg is this face's own tail.
    struct Corner {
        int vertex;
        int in_edge;
        bool in_along;
        int out_edge;
        bool out_along;
        int leg_edge;
        bool leg_outward;
        bool tail_corner;
    };
    struct Crossing {
        int edge;
        int from_face, to_face;
        bool left_to_right;  // path crosses from the edge's left face to its right face
    };

    static Lattice honeycomb_torus(int lx, int ly);

    int lx() const { return lx_; }
    int ly() const { return ly_; }
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    const Edge& edge(int e) const { return edges_[e]; }
    const Face& face(int f) const { return faces_[f]; }
    Vec2 vertex_pos(int v) const { return vertices_[v].pos; }
    bool is_puncture(int v) const { return vertices_[v].puncture; }

    // The three (or one, at punctures) incident edges with outgoing flags.
    std::vector<std::pair<int, bool>> vertex_star(int v) const;

    std::vector<Corner> corners(int f) const;

    // Split the face's first boundary edge and hang a tail toward a new
    // puncture inside the face. Returns the modified lattice; tail_edge_out
    // receives the new tail register. The tail edge is oriented inward
    // (split vertex -> puncture).
    Lattice with_tail(int f, int* tail_edge_out) const;

    // Shortest dual path between two faces (BFS, deterministic tie-break).
    std::vector<Crossing> dual_path(int f0, int f1) const;
    // Path visiting the given faces in order, concatenating shortest legs.
    std::vector<Crossing> dual_path_through(const std::vector<int>& faces) const;
    int dual_distance(int f0, int f1) const;

    // Greedy nearest-neighbor pairing of faces in the dual graph. Any odd
    // remainder is returned in leftover (used by Zn syndrome routing).
    std::vector<std::pair<int, int>> pair_greedy(std::vector<int> faces,
                                                 std::vector<int>* leftover = nullptr) const;

    struct Region {
        std::vector<int> faces;
        bool connected = false;
        bool disk = false;
        std::vector<int> interior_edges;    // both adjacent faces inside
        std::vector<int> inner_vertices;    // endpoints of interior edges
        std::vector<int> deep_faces;        // faces all of whose edges are interior
        // Spanning tree of (inner_vertices, interior_edges): parent edge per
        // vertex, root has -1. Only meaningful when connected.
        int tree_root = -1;
        std::map<int, int> tree_parent_edge;
        std::map<int, int> tree_parent_vertex;
    };
    Region analyze_region(const std::vector<int>& faces) const;

    // Parse "0,1,3" into face indices, validating range.
    std::vector<int> parse_face_list(const std::string& spec) const;

  private:
    struct Vertex {
        Vec2 pos;
        std::vector<std::pair<int, bool>> star;  // (edge, outgoing), sorted by angle
        bool puncture = false;
    };

    void trace_faces();
    void sort_stars();

    int lx_ = 0, ly_ = 0;
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<Face> faces_;
};

}  // namespace anyonprep
