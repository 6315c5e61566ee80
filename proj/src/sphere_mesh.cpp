#include "degtk/sphere_mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace degtk {

namespace {

double simplex_det(const TriangulatedSphere& mesh, int cell) {
  const int d = mesh.n + 1;
  Eigen::MatrixXd rows(d, d);
  for (int k = 0; k < d; ++k) rows.row(k) = mesh.vertices.row(mesh.simplices(cell, k));
  return rows.determinant();
}

// Swap the first two vertices when needed so every simplex has det > 0.
void fix_orientation(TriangulatedSphere& mesh, int cell) {
  if (simplex_det(mesh, cell) < 0.0) std::swap(mesh.simplices(cell, 0), mesh.simplices(cell, 1));
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

class MidpointCache {
public:
  MidpointCache(const TriangulatedSphere& parent, std::vector<Eigen::VectorXd>& verts)
      : parent_(parent), verts_(verts) {}

  int midpoint(int a, int b) {
    const auto key = edge_key(a, b);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Eigen::VectorXd m = parent_.vertices.row(a) + parent_.vertices.row(b);
    m.normalize();
    const int id = static_cast<int>(verts_.size());
    verts_.push_back(std::move(m));
    cache_.emplace(key, id);
    return id;
  }

private:
  const TriangulatedSphere& parent_;
  std::vector<Eigen::VectorXd>& verts_;
  std::unordered_map<std::uint64_t, int> cache_;
};

TriangulatedSphere base_mesh(int n) {
  const int d = n + 1;
  TriangulatedSphere mesh;
  mesh.n = n;
  mesh.level = 0;
  mesh.vertices = Eigen::MatrixXd::Zero(2 * d, d);
  for (int i = 0; i < d; ++i) {
    mesh.vertices(2 * i, i) = 1.0;
    mesh.vertices(2 * i + 1, i) = -1.0;
  }
  const int cells = 1 << d;
  mesh.simplices.resize(cells, d);
  for (int mask = 0; mask < cells; ++mask) {
    for (int i = 0; i < d; ++i) {
      const bool negative = (mask >> i) & 1;
      mesh.simplices(mask, i) = 2 * i + (negative ? 1 : 0);
    }
    fix_orientation(mesh, mask);
  }
  return mesh;
}

}  // namespace

int max_mesh_level(int n) {
  switch (n) {
    case 1: return 12;
    case 2: return 7;
    case 3: return 6;
    default: throw ValidationError("sphere dimension must be 1, 2 or 3");
  }
}

TriangulatedSphere build_mesh(int n, int level) {
  if (n < 1 || n > 3) throw ValidationError("sphere dimension must be 1, 2 or 3");
  if (level < 0 || level > max_mesh_level(n)) {
    throw ValidationError("mesh level " + std::to_string(level) + " outside [0, " +
                          std::to_string(max_mesh_level(n)) + "] for n = " + std::to_string(n));
  }
  TriangulatedSphere mesh = base_mesh(n);
  for (int l = 0; l < level; ++l) mesh = refine(mesh);
  return mesh;
}

TriangulatedSphere refine(const TriangulatedSphere& mesh) {
  if (mesh.level + 1 > max_mesh_level(mesh.n)) {
    throw ValidationError("refinement beyond level cap " + std::to_string(max_mesh_level(mesh.n)) +
                          " for n = " + std::to_string(mesh.n));
  }

  std::vector<Eigen::VectorXd> verts;
  verts.reserve(mesh.vertex_count() * 4);
  for (int i = 0; i < mesh.vertex_count(); ++i) verts.push_back(mesh.vertices.row(i));
  MidpointCache mids(mesh, verts);

  const int children_per_cell = 1 << mesh.n;
  TriangulatedSphere out;
  out.n = mesh.n;
  out.level = mesh.level + 1;
  out.simplices.resize(mesh.simplex_count() * children_per_cell, mesh.n + 1);

  int next = 0;
  auto emit = [&](std::initializer_list<int> ids) {
    int k = 0;
    for (int id : ids) out.simplices(next, k++) = id;
    ++next;
  };

  for (int c = 0; c < mesh.simplex_count(); ++c) {
    if (mesh.n == 1) {
      const int a = mesh.simplices(c, 0), b = mesh.simplices(c, 1);
      const int m = mids.midpoint(a, b);
      emit({a, m});
      emit({m, b});
    } else if (mesh.n == 2) {
      const int a = mesh.simplices(c, 0), b = mesh.simplices(c, 1), cc = mesh.simplices(c, 2);
      const int ab = mids.midpoint(a, b);
      const int bc = mids.midpoint(b, cc);
      const int ca = mids.midpoint(cc, a);
      emit({a, ab, ca});
      emit({b, bc, ab});
      emit({cc, ca, bc});
      emit({ab, bc, ca});
    } else {
      const int v0 = mesh.simplices(c, 0), v1 = mesh.simplices(c, 1);
      const int v2 = mesh.simplices(c, 2), v3 = mesh.simplices(c, 3);
      const int m01 = mids.midpoint(v0, v1), m02 = mids.midpoint(v0, v2);
      const int m03 = mids.midpoint(v0, v3), m12 = mids.midpoint(v1, v2);
      const int m13 = mids.midpoint(v1, v3), m23 = mids.midpoint(v2, v3);
      emit({v0, m01, m02, m03});
      emit({v1, m01, m12, m13});
      emit({v2, m02, m12, m23});
      emit({v3, m03, m13, m23});

      // Interior octahedron: three candidate diagonals join midpoints of
      // opposite edges. Pick the shortest after reprojection; break ties by
      // lowest vertex index so refinement is reproducible.
      struct Diagonal {
        int p, q;
        std::array<int, 4> ring;
      };
      const Diagonal candidates[3] = {
          {m01, m23, {m02, m03, m13, m12}},
          {m02, m13, {m01, m03, m23, m12}},
          {m03, m12, {m01, m02, m23, m13}},
      };
      int best = 0;
      auto rank = [&](const Diagonal& d) {
        const double len = (verts[d.p] - verts[d.q]).norm();
        return std::make_tuple(len, std::min(d.p, d.q), std::max(d.p, d.q));
      };
      for (int k = 1; k < 3; ++k) {
        if (rank(candidates[k]) < rank(candidates[best])) best = k;
      }
      const Diagonal& d = candidates[best];
      for (int k = 0; k < 4; ++k) {
        emit({d.p, d.q, d.ring[k], d.ring[(k + 1) % 4]});
      }
    }
  }

  out.vertices.resize(static_cast<int>(verts.size()), mesh.n + 1);
  for (std::size_t i = 0; i < verts.size(); ++i) out.vertices.row(static_cast<int>(i)) = verts[i];
  for (int c = 0; c < out.simplex_count(); ++c) fix_orientation(out, c);
  return out;
}

ValidityReport validate_mesh(const TriangulatedSphere& mesh) {
  ValidityReport report;
  const int d = mesh.n + 1;

  for (int c = 0; c < mesh.simplex_count(); ++c) {
    if (simplex_det(mesh, c) <= 0.0) report.orientation_violations.push_back(c);
  }

  std::map<std::vector<int>, int> face_count;
  for (int c = 0; c < mesh.simplex_count(); ++c) {
    for (int drop = 0; drop < d; ++drop) {
      std::vector<int> face;
      face.reserve(d - 1);
      for (int k = 0; k < d; ++k) {
        if (k != drop) face.push_back(mesh.simplices(c, k));
      }
      std::sort(face.begin(), face.end());
      ++face_count[face];
    }
  }
  for (const auto& [face, count] : face_count) {
    if (count != 2) report.nonmanifold_faces.push_back(face);
  }

  for (int i = 0; i < mesh.vertex_count(); ++i) {
    if (std::abs(mesh.vertices.row(i).norm() - 1.0) > 1e-12) {
      report.off_sphere_vertices.push_back(i);
    }
  }

  // Near-duplicate scan via lexicographic sort and a bounded window; vertices
  // produced by refinement are deduplicated by construction, so this is a net.
  std::vector<int> order(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (int k = 0; k < d; ++k) {
      if (mesh.vertices(a, k) != mesh.vertices(b, k)) return mesh.vertices(a, k) < mesh.vertices(b, k);
    }
    return a < b;
  });
  const int window = 32;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < std::min(order.size(), i + 1 + window); ++j) {
      if ((mesh.vertices.row(order[i]) - mesh.vertices.row(order[j])).norm() < 1e-9) {
        report.duplicate_vertices.push_back({std::min(order[i], order[j]), std::max(order[i], order[j])});
      }
    }
  }
  return report;
}

double signed_volume(const TriangulatedSphere& mesh) {
  double factorial = 1.0;
  for (int k = 2; k <= mesh.n + 1; ++k) factorial *= k;
  double total = 0.0;
  for (int c = 0; c < mesh.simplex_count(); ++c) total += simplex_det(mesh, c);
  return total / factorial;
}

double max_edge_chord(const TriangulatedSphere& mesh) {
  const int d = mesh.n + 1;
  double best = 0.0;
  for (int c = 0; c < mesh.simplex_count(); ++c) {
    for (int a = 0; a < d; ++a) {
      for (int b = a + 1; b < d; ++b) {
        const double len =
            (mesh.vertices.row(mesh.simplices(c, a)) - mesh.vertices.row(mesh.simplices(c, b))).norm();
        best = std::max(best, len);
      }
    }
  }
  return best;
}

std::string to_off(const TriangulatedSphere& mesh) {
  std::ostringstream os;
  os.precision(17);
  const int d = mesh.n + 1;
  if (d == 3) {
    os << "OFF\n";
  } else {
    os << "nOFF\n" << d << "\n";
  }
  os << mesh.vertex_count() << " " << mesh.simplex_count() << " 0\n";
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    for (int k = 0; k < d; ++k) os << (k ? " " : "") << mesh.vertices(i, k);
    os << "\n";
  }
  for (int c = 0; c < mesh.simplex_count(); ++c) {
    os << d;
    for (int k = 0; k < d; ++k) os << " " << mesh.simplices(c, k);
    os << "\n";
  }
  return os.str();
}

std::shared_ptr<const TriangulatedSphere> cached_mesh(int n, int level) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const TriangulatedSphere>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({n, level});
  if (it != cache.end()) return it->second;
  // Extend from the deepest cached level below to avoid rebuilding from scratch.
  std::shared_ptr<const TriangulatedSphere> base;
  int base_level = -1;
  for (int l = level - 1; l >= 0; --l) {
    auto lower = cache.find({n, l});
    if (lower != cache.end()) {
      base = lower->second;
      base_level = l;
      break;
    }
  }
  TriangulatedSphere mesh = base ? *base : build_mesh(n, 0);
  if (!base) base_level = 0;
  for (int l = base_level; l < level; ++l) mesh = refine(mesh);
  auto shared = std::make_shared<const TriangulatedSphere>(std::move(mesh));
  cache.emplace(std::make_pair(n, level), shared);
  return shared;
}

}  // namespace degtk
