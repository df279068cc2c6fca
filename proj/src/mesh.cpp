#include "flda/mesh.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace flda {

namespace {

using Edge = std::pair<int, int>;

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

std::map<Edge, int> edge_use_counts(const TriangleMesh& mesh) {
    std::map<Edge, int> counts;
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        for (int k = 0; k < 3; ++k) {
            counts[make_edge(mesh.faces(f, k), mesh.faces(f, (k + 1) % 3))]++;
        }
    }
    return counts;
}

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

Eigen::Index TriangleMesh::edge_count() const {
    return static_cast<Eigen::Index>(edge_use_counts(*this).size());
}

long TriangleMesh::euler_characteristic() const {
    return static_cast<long>(vertex_count()) - static_cast<long>(edge_count()) +
           static_cast<long>(face_count());
}

Eigen::Vector3d TriangleMesh::centroid() const {
    return vertices.colwise().mean().transpose();
}

double TriangleMesh::centroid_size() const {
    Eigen::MatrixX3d centered = vertices.rowwise() - vertices.colwise().mean();
    return centered.norm();
}

double TriangleMesh::mean_edge_length() const {
    double total = 0.0;
    long count = 0;
    for (const auto& [edge, uses] : edge_use_counts(*this)) {
        total += (vertices.row(edge.first) - vertices.row(edge.second)).norm();
        ++count;
    }
    return count > 0 ? total / static_cast<double>(count) : 0.0;
}

void validate_mesh(const TriangleMesh& mesh) {
    const Eigen::Index s = mesh.vertex_count();
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const int idx = mesh.faces(f, k);
            if (idx < 0 || idx >= s) {
                throw ValidationError("face " + std::to_string(f) +
                                      ", index out of range: " + std::to_string(idx));
            }
        }
        const int i = mesh.faces(f, 0), j = mesh.faces(f, 1), k = mesh.faces(f, 2);
        if (i == j || j == k || i == k) {
            throw ValidationError("face " + std::to_string(f) + ", repeated vertex index");
        }
    }
    const double mel = mesh.mean_edge_length();
    const double area_floor = 1e-12 * mel * mel;
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        const double area = triangle_area(mesh.vertices.row(mesh.faces(f, 0)),
                                          mesh.vertices.row(mesh.faces(f, 1)),
                                          mesh.vertices.row(mesh.faces(f, 2)));
        if (!(area > area_floor)) {
            throw ValidationError("face " + std::to_string(f) + ", degenerate (area " +
                                  std::to_string(area) + ")");
        }
    }
    for (const auto& [edge, uses] : edge_use_counts(mesh)) {
        if (uses > 2) {
            throw ValidationError("non-manifold edge (" + std::to_string(edge.first) + "," +
                                  std::to_string(edge.second) + ") shared by " +
                                  std::to_string(uses) + " faces");
        }
    }
}

namespace {

std::string next_content_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto start = line.find_first_not_of(" \t\r\n");
        if (start == std::string::npos) continue;
        return line;
    }
    return {};
}

TriangleMesh parse_off(std::istream& in, const std::string& path) {
    std::string header = next_content_line(in);
    // Trim trailing whitespace.
    header.erase(header.find_last_not_of(" \t\r\n") + 1);
    if (header != "OFF") throw ParseError(path + ": missing OFF header");
    std::istringstream counts(next_content_line(in));
    long nv = -1, nf = -1, ne = 0;
    if (!(counts >> nv >> nf >> ne) || nv < 0 || nf < 0) {
        throw ParseError(path + ": bad counts line");
    }
    TriangleMesh mesh;
    mesh.vertices.resize(nv, 3);
    for (long v = 0; v < nv; ++v) {
        std::istringstream row(next_content_line(in));
        if (!(row >> mesh.vertices(v, 0) >> mesh.vertices(v, 1) >> mesh.vertices(v, 2))) {
            throw ParseError(path + ": bad vertex line " + std::to_string(v));
        }
    }
    mesh.faces.resize(nf, 3);
    for (long f = 0; f < nf; ++f) {
        std::istringstream row(next_content_line(in));
        int arity = 0;
        if (!(row >> arity) || arity != 3) {
            throw ParseError(path + ": face " + std::to_string(f) + " is not a triangle");
        }
        if (!(row >> mesh.faces(f, 0) >> mesh.faces(f, 1) >> mesh.faces(f, 2))) {
            throw ParseError(path + ": bad face line " + std::to_string(f));
        }
    }
    return mesh;
}

TriangleMesh parse_obj(std::istream& in, const std::string& path) {
    std::vector<Eigen::Vector3d> verts;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream row(line);
        std::string tag;
        if (!(row >> tag)) continue;
        if (tag == "v") {
            Eigen::Vector3d p;
            if (!(row >> p.x() >> p.y() >> p.z())) {
                throw ParseError(path + ": bad vertex at line " + std::to_string(lineno));
            }
            verts.push_back(p);
        } else if (tag == "f") {
            std::array<int, 3> face{};
            for (int k = 0; k < 3; ++k) {
                std::string tok;
                if (!(row >> tok)) {
                    throw ParseError(path + ": bad face at line " + std::to_string(lineno));
                }
                // "i", "i/t", "i/t/n" forms; positions only.
                face[k] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            std::string extra;
            if (row >> extra) {
                throw ParseError(path + ": non-triangular face at line " +
                                 std::to_string(lineno));
            }
            faces.push_back(face);
        }
    }
    TriangleMesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t v = 0; v < verts.size(); ++v) mesh.vertices.row(v) = verts[v];
    mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (size_t f = 0; f < faces.size(); ++f) {
        mesh.faces(f, 0) = faces[f][0];
        mesh.faces(f, 1) = faces[f][1];
        mesh.faces(f, 2) = faces[f][2];
    }
    return mesh;
}

}  // namespace

TriangleMesh load_mesh(const std::string& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    TriangleMesh mesh =
        format == MeshFormat::OFF ? parse_off(in, path) : parse_obj(in, path);
    validate_mesh(mesh);
    return mesh;
}

TriangleMesh load_mesh(const std::string& path) {
    const auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    return load_mesh(path, ext == ".obj" ? MeshFormat::OBJ : MeshFormat::OFF);
}

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "OFF\n" << mesh.vertex_count() << " " << mesh.face_count() << " 0\n";
    char buf[96];
    for (Eigen::Index v = 0; v < mesh.vertex_count(); ++v) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", mesh.vertices(v, 0),
                      mesh.vertices(v, 1), mesh.vertices(v, 2));
        out << buf;
    }
    for (Eigen::Index f = 0; f < mesh.face_count(); ++f) {
        out << "3 " << mesh.faces(f, 0) << " " << mesh.faces(f, 1) << " "
            << mesh.faces(f, 2) << "\n";
    }
}

TriangleMesh icosphere(int subdivisions, double radius) {
    if (subdivisions < 0) throw DataError("icosphere: negative subdivision level");
    if (subdivisions > 7) throw LimitExceeded("icosphere: subdivision level > 7");
    if (!(radius > 0)) throw DataError("icosphere: radius must be positive");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& v : verts) v.normalize();

    for (int level = 0; level < subdivisions; ++level) {
        std::map<Edge, int> midpoint;
        auto mid = [&](int a, int b) {
            const Edge e = make_edge(a, b);
            auto it = midpoint.find(e);
            if (it != midpoint.end()) return it->second;
            Eigen::Vector3d m = (verts[a] + verts[b]).normalized();
            verts.push_back(m);
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(e, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    TriangleMesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t v = 0; v < verts.size(); ++v) mesh.vertices.row(v) = radius * verts[v];
    mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (size_t f = 0; f < faces.size(); ++f) {
        mesh.faces(f, 0) = faces[f][0];
        mesh.faces(f, 1) = faces[f][1];
        mesh.faces(f, 2) = faces[f][2];
    }
    return mesh;
}

namespace {

// Rotation aligning X to Y in least squares, restricted to det +1.
Eigen::Matrix3d kabsch_rotation(const Eigen::MatrixX3d& from, const Eigen::MatrixX3d& to) {
    const Eigen::Matrix3d H = from.transpose() * to;
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0) d(2, 2) = -1;
    return svd.matrixV() * d * svd.matrixU().transpose();
}

Eigen::MatrixX3d center_and_unit_size(const Eigen::MatrixX3d& pts) {
    Eigen::MatrixX3d centered = pts.rowwise() - pts.colwise().mean();
    const double size = centered.norm();
    if (!(size > 0)) throw DataError("procrustes: degenerate configuration (zero size)");
    return centered / size;
}

}  // namespace

ProcrustesResult generalized_procrustes(const std::vector<TriangleMesh>& meshes,
                                        double tol, int max_iter) {
    if (meshes.size() < 2) throw DataError("procrustes: need at least 2 meshes");
    for (size_t i = 1; i < meshes.size(); ++i) {
        if (meshes[i].faces.rows() != meshes[0].faces.rows() ||
            meshes[i].vertices.rows() != meshes[0].vertices.rows() ||
            meshes[i].faces != meshes[0].faces) {
            throw ConnectivityMismatch("procrustes: mesh " + std::to_string(i) +
                                       " connectivity differs from mesh 0");
        }
    }

    std::vector<Eigen::MatrixX3d> shapes;
    shapes.reserve(meshes.size());
    for (const auto& m : meshes) shapes.push_back(center_and_unit_size(m.vertices));

    Eigen::MatrixX3d mean = shapes[0];
    int iter = 0;
    double change = 0.0;
    for (; iter < max_iter; ++iter) {
        for (auto& shape : shapes) {
            shape = shape * kabsch_rotation(shape, mean).transpose();
        }
        Eigen::MatrixX3d next = Eigen::MatrixX3d::Zero(mean.rows(), 3);
        for (const auto& shape : shapes) next += shape;
        next /= static_cast<double>(shapes.size());
        next = center_and_unit_size(next);
        change = (next - mean).norm();
        mean = next;
        if (change < tol) {
            ++iter;
            break;
        }
    }

    ProcrustesResult result;
    result.iterations = iter;
    result.final_change = change;
    result.aligned.reserve(meshes.size());
    for (const auto& shape : shapes) {
        result.aligned.push_back(TriangleMesh{shape, meshes[0].faces});
    }
    result.template_mesh = TriangleMesh{mean, meshes[0].faces};
    return result;
}

}  // namespace flda
