#include "flatmod/congruence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace flatmod {

namespace {

std::int64_t mod(std::int64_t x, std::int64_t m) { return ((x % m) + m) % m; }
bool even(std::int64_t x) { return mod(x, 2) == 0; }

SubgroupSpec make(std::string name, Predicate p, bool group = true) {
    return SubgroupSpec{std::move(name), std::move(p), group};
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// sign-normalized key for PSL bookkeeping
Mat2 psl_key(const Mat2& m) { return std::max(m, -m); }

std::size_t cycle_count(const std::vector<std::size_t>& perm) {
    std::vector<bool> seen(perm.size(), false);
    std::size_t cycles = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (seen[i]) continue;
        ++cycles;
        for (std::size_t j = i; !seen[j]; j = perm[j]) seen[j] = true;
    }
    return cycles;
}

// permutation of PSL classes induced by right multiplication by x
std::vector<std::size_t> class_permutation(const CosetTable& t, const SubgroupSpec& spec, const Mat2& x) {
    std::vector<std::size_t> perm(t.psl_count);
    for (std::size_t i = 0; i < t.index(); ++i) {
        auto j = coset_of(t, spec, t.representatives[i] * x);
        if (!j) throw InconsistentInvariants("coset table is not closed under right multiplication");
        perm[t.psl_class[i]] = t.psl_class[*j];
    }
    return perm;
}

void fill_permutations(CosetTable& t, const SubgroupSpec& spec) {
    const std::size_t n = t.index();
    t.perm_S.assign(n, 0);
    t.perm_T.assign(n, 0);
    t.psl_class.assign(n, n);
    t.psl_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto s = coset_of(t, spec, t.representatives[i] * sl2::S);
        auto u = coset_of(t, spec, t.representatives[i] * sl2::T);
        if (!s || !u) throw InconsistentInvariants("representatives do not form a complete coset system");
        t.perm_S[i] = *s;
        t.perm_T[i] = *u;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (t.psl_class[i] != n) continue;
        t.psl_class[i] = t.psl_count;
        auto j = coset_of(t, spec, -t.representatives[i]);
        if (j) t.psl_class[*j] = t.psl_count;
        ++t.psl_count;
    }
}

Edge opposite(Edge e) {
    switch (e) {
        case Edge::Left: return Edge::Right;
        case Edge::Right: return Edge::Left;
        case Edge::ArcLeft: return Edge::ArcRight;
        case Edge::ArcRight: return Edge::ArcLeft;
    }
    return e;
}

Mat2 crossing(Edge e) {
    switch (e) {
        case Edge::Left: return sl2::Tinv;
        case Edge::Right: return sl2::T;
        default: return sl2::S;
    }
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

}  // namespace

Mat2 Mat2::inverse() const {
    const std::int64_t e = det();
    if (e != 1 && e != -1) throw PreconditionViolated("inverse of " + str() + " is not integral");
    return {e * d, -e * b, -e * c, e * a};
}

std::string Mat2::str() const {
    return "[[" + std::to_string(a) + "," + std::to_string(b) + "],[" + std::to_string(c) + "," + std::to_string(d) +
           "]]";
}

Mat2 to_mat2(const QMatrix& M) {
    if (M.rows() != 2 || M.cols() != 2 || !is_integral(M))
        throw PreconditionViolated("expected an integral 2x2 matrix, got " + to_string(M));
    return {M(0, 0).numerator().to_ll(), M(0, 1).numerator().to_ll(), M(1, 0).numerator().to_ll(),
            M(1, 1).numerator().to_ll()};
}

QMatrix to_qmatrix(const Mat2& m) {
    return qmatrix({{Rational(m.a), Rational(m.b)}, {Rational(m.c), Rational(m.d)}});
}

Mat2 canonical_up_to_sign_and_inverse(const Mat2& m) {
    Mat2 i = m.inverse();
    return std::min({m, -m, i, -i});
}

SubgroupSpec subgroup_spec(const std::string& name) {
    const std::string n = lower(name);
    if (n == "gl2z" || n == "sl2" || n == "sl2z")
        return make("GL2Z", [](const Mat2&) { return true; });
    if (n == "gamma(2)" || n == "gamma_2")
        return make("Gamma(2)", [](const Mat2& m) { return even(m.b) && even(m.c); });
    if (n == "gamma0(2)^t" || n == "gamma0_2t")
        return make("Gamma0(2)^t", [](const Mat2& m) { return even(m.b); });
    if (n == "gamma0(4)" || n == "gamma0_4")
        return make("Gamma0(4)", [](const Mat2& m) { return even(m.b) && mod(m.c, 4) == 0; });
    if (n == "gamma(2)y" || n == "gamma_2y")
        return make("Gamma(2)Y", [](const Mat2& m) { return (even(m.b) && even(m.c)) || (even(m.a) && even(m.d)); });
    if (n == "gamma_2(4)" || n == "gamma2_4")
        return make("Gamma_2(4)", [](const Mat2& m) { return even(m.b) && mod(m.c, 4) == 2; }, false);
    throw UnknownSubgroup("unknown subgroup '" + name + "'");
}

std::vector<SubgroupSpec> registry() {
    return {subgroup_spec("GL2Z"), subgroup_spec("Gamma0(2)^t"), subgroup_spec("Gamma(2)"), subgroup_spec("Gamma0(4)"),
            subgroup_spec("Gamma(2)Y")};
}

bool membership(const std::string& name, const Mat2& g) { return subgroup_spec(name).contains(g); }

std::optional<std::size_t> coset_of(const CosetTable& t, const SubgroupSpec& spec, const Mat2& g) {
    for (std::size_t j = 0; j < t.representatives.size(); ++j)
        if (spec.contains(g * t.representatives[j].inverse())) return j;
    return std::nullopt;
}

CosetTable coset_enumeration(const SubgroupSpec& spec, std::size_t cap) {
    if (!spec.is_group) throw PreconditionViolated(spec.name + " is a coset, not a subgroup");
    CosetTable t;
    t.representatives.push_back(sl2::Id);
    t.words.push_back("Id");
    std::deque<std::size_t> queue{0};
    const std::pair<Mat2, char> steps[] = {{sl2::S, 'S'}, {sl2::T, 'T'}, {sl2::Tinv, 't'}};
    while (!queue.empty()) {
        std::size_t i = queue.front();
        queue.pop_front();
        for (const auto& [s, letter] : steps) {
            Mat2 g = t.representatives[i] * s;
            if (coset_of(t, spec, g)) continue;
            if (t.representatives.size() >= cap)
                throw IndexCapExceeded(spec.name + ": more than " + std::to_string(cap) + " cosets");
            t.representatives.push_back(g);
            t.words.push_back((i == 0 ? std::string() : t.words[i]) + letter);
            queue.push_back(t.representatives.size() - 1);
        }
    }
    fill_permutations(t, spec);
    return t;
}

CosetTable coset_table_from(const SubgroupSpec& spec, const std::vector<Mat2>& representatives) {
    CosetTable t;
    for (std::size_t k = 0; k < representatives.size(); ++k) {
        const Mat2& r = representatives[k];
        if (r.det() != 1) throw PreconditionViolated("representative " + r.str() + " is not in SL(2,Z)");
        if (coset_of(t, spec, r)) throw PreconditionViolated("representative " + r.str() + " repeats a coset");
        t.representatives.push_back(r);
        t.words.push_back(r == sl2::Id ? "Id" : "r" + std::to_string(k));
    }
    if (t.representatives.empty() || t.representatives.front() != sl2::Id)
        throw PreconditionViolated("representative 0 must be the identity");
    fill_permutations(t, spec);
    return t;
}

std::vector<Mat2> compose_representatives(const std::vector<Mat2>& inner, const std::vector<Mat2>& outer) {
    std::vector<Mat2> out;
    for (const auto& h : inner)
        for (const auto& g : outer) out.push_back(h * g);
    return out;
}

std::size_t cusp_count(const CosetTable& t, const SubgroupSpec& spec) {
    return cycle_count(class_permutation(t, spec, sl2::T));
}

std::pair<std::size_t, std::size_t> elliptic_counts(const CosetTable& t, const SubgroupSpec& spec) {
    auto fixed = [](const std::vector<std::size_t>& p) {
        std::size_t n = 0;
        for (std::size_t i = 0; i < p.size(); ++i) n += p[i] == i;
        return n;
    };
    return {fixed(class_permutation(t, spec, sl2::S)), fixed(class_permutation(t, spec, sl2::S * sl2::T))};
}

Rational SurfaceType::orbifold_euler_characteristic() const {
    Rational chi = Rational(2 - 2 * genus - cusp_count);
    for (int e : cone_points) chi = chi - (Rational(1) - Rational(1, e));
    return chi;
}

std::string SurfaceType::to_string() const {
    std::string s = underlying_name + " (genus " + std::to_string(genus) + ", " + std::to_string(cusp_count) + " cusps";
    if (!cone_points.empty()) {
        s += ", cone points";
        for (int e : cone_points) s += " " + std::to_string(e);
    }
    return s + ")";
}

SurfaceType surface_classification(const CosetTable& t, const SubgroupSpec& spec) {
    const auto mu = static_cast<long long>(t.psl_count);
    const auto cusps = static_cast<long long>(cusp_count(t, spec));
    auto [e2, e3] = elliptic_counts(t, spec);
    Rational g = Rational(1) + Rational(mu, 12) - Rational(static_cast<long long>(e2), 4) -
                 Rational(static_cast<long long>(e3), 3) - Rational(cusps, 2);
    if (!g.is_integer() || g < Rational(0))
        throw InconsistentInvariants(spec.name + ": genus formula gives " + g.str());
    SurfaceType s;
    s.genus = static_cast<int>(g.numerator().to_ll());
    s.cusp_count = static_cast<int>(cusps);
    s.cone_points.insert(s.cone_points.end(), e2, 2);
    s.cone_points.insert(s.cone_points.end(), e3, 3);
    s.psl_index = t.psl_count;
    if (s.orbifold_euler_characteristic() != Rational(-mu, 6))
        throw InconsistentInvariants(spec.name + ": orbifold Euler characteristic mismatch");
    if (s.genus == 0 && s.cusp_count == 3) s.underlying_name = "3-punctured sphere";
    else if (s.genus == 0 && s.cusp_count == 4) s.underlying_name = "4-punctured sphere";
    else if (s.genus == 0 && s.cusp_count == 2) s.underlying_name = "cylinder S1xR";
    else if (s.genus == 0 && s.cusp_count == 1) s.underlying_name = "plane R2";
    else
        s.underlying_name = "genus " + std::to_string(s.genus) + " surface with " + std::to_string(s.cusp_count) +
                            " punctures";
    return s;
}

SurfaceType classify_surface(const SubgroupSpec& spec, std::size_t cap) {
    return surface_classification(coset_enumeration(spec, cap), spec);
}

std::string to_string(Edge e) {
    switch (e) {
        case Edge::Left: return "left";
        case Edge::Right: return "right";
        case Edge::ArcLeft: return "arc-left";
        case Edge::ArcRight: return "arc-right";
    }
    return "?";
}

std::vector<Mat2> FundamentalDomain::pairing_matrices() const {
    std::vector<Mat2> out;
    for (const auto& p : edge_pairings) out.push_back(p.gamma);
    return out;
}

FundamentalDomain fundamental_domain(const CosetTable& t, const SubgroupSpec& spec) {
    FundamentalDomain fd;
    std::vector<std::size_t> tile_of_class(t.psl_count, t.index());
    for (std::size_t i = 0; i < t.index(); ++i) {
        if (tile_of_class[t.psl_class[i]] != t.index()) continue;
        tile_of_class[t.psl_class[i]] = fd.tiles.size();
        fd.tiles.emplace_back(i, t.representatives[i]);
        fd.labels.push_back(t.words[i]);
    }
    const Edge edges[] = {Edge::Left, Edge::Right, Edge::ArcLeft, Edge::ArcRight};
    struct Target {
        std::size_t tile;
        Edge edge;
        Mat2 gamma;
    };
    auto across = [&](std::size_t k, Edge e) -> std::optional<Target> {
        Mat2 g = fd.tiles[k].second * crossing(e);
        auto j = coset_of(t, spec, g);
        if (!j) throw PairingIncomplete("edge " + to_string(e) + " of tile " + std::to_string(k) + " leaves the table");
        std::size_t other = tile_of_class[t.psl_class[*j]];
        Mat2 gamma = g * fd.tiles[other].second.inverse();
        if (gamma.is_plus_minus_identity()) return std::nullopt;
        if (!spec.contains(gamma)) gamma = -gamma;
        if (!spec.contains(gamma)) throw PairingIncomplete("pairing " + gamma.str() + " is not in " + spec.name);
        return Target{other, opposite(e), gamma};
    };
    for (std::size_t k = 0; k < fd.tiles.size(); ++k)
        for (Edge e : edges) {
            auto target = across(k, e);
            if (!target) continue;
            auto back = across(target->tile, target->edge);
            if (!back || back->tile != k || back->edge != e ||
                psl_key(back->gamma) != psl_key(target->gamma.inverse()))
                throw PairingIncomplete("edge " + to_string(e) + " of tile " + std::to_string(k) + " is not matched");
            if (std::make_pair(k, static_cast<int>(e)) <= std::make_pair(target->tile, static_cast<int>(target->edge)))
                fd.edge_pairings.push_back({k, e, target->tile, target->edge, target->gamma});
        }
    return fd;
}

std::string Cusp::str() const {
    if (is_infinity()) return "inf";
    if (q == 1) return std::to_string(p);
    return std::to_string(p) + "/" + std::to_string(q);
}

Cusp make_cusp(std::int64_t p, std::int64_t q) {
    if (q == 0) return {1, 0};
    std::int64_t g = std::gcd(p, q);
    p /= g;
    q /= g;
    if (q < 0) {
        p = -p;
        q = -q;
    }
    return {p, q};
}

Cusp mobius(const Mat2& g, const Cusp& x) { return make_cusp(g.a * x.p + g.b * x.q, g.c * x.p + g.d * x.q); }

std::complex<double> mobius(const Mat2& g, std::complex<double> z) {
    return (static_cast<double>(g.a) * z + static_cast<double>(g.b)) /
           (static_cast<double>(g.c) * z + static_cast<double>(g.d));
}

HalfPlaneCoordinates halfplane_coordinates(const QMatrix& G) {
    if (G.rows() != 2 || G.cols() != 2) throw PreconditionViolated("expected a 2x2 matrix");
    Rational det = determinant(G);
    if (det.is_zero()) throw PreconditionViolated("singular matrix");
    HalfPlaneCoordinates h;
    h.exact_form = G.transpose() * G;
    const double A = h.exact_form(0, 0).to_double();
    const double B = h.exact_form(0, 1).to_double();
    const double disc = (h.exact_form(0, 0) * h.exact_form(1, 1) - h.exact_form(0, 1) * h.exact_form(0, 1)).to_double();
    h.scale = abs(det).to_double();
    h.z = {-B / A, std::sqrt(disc) / A};
    return h;
}

std::string to_string(MotionKind k) {
    switch (k) {
        case MotionKind::Identity: return "identity";
        case MotionKind::Elliptic: return "elliptic";
        case MotionKind::Parabolic: return "parabolic";
        case MotionKind::Hyperbolic: return "hyperbolic";
        case MotionKind::OrientationReversing: return "orientation-reversing";
    }
    return "?";
}

MotionKind classify_motion(const Mat2& m) {
    if (m.det() == -1) return MotionKind::OrientationReversing;
    if (m.is_plus_minus_identity()) return MotionKind::Identity;
    const std::int64_t t = m.trace() < 0 ? -m.trace() : m.trace();
    if (t < 2) return MotionKind::Elliptic;
    if (t == 2) return MotionKind::Parabolic;
    return MotionKind::Hyperbolic;
}

std::string InvolutionReport::summary() const {
    std::ostringstream out;
    out << "B0 = " << b0.str() << ", " << elements_examined << " elements of the subgroup examined: ";
    if (identity_inducing) {
        out << "gamma B0 = +-Id for gamma = " << identity_inducing->first.str() << " (identity map)";
        return out.str();
    }
    if (!elliptic.empty()) {
        const auto& w = elliptic.front();
        out << elliptic.size() << " elliptic gamma B0; first delta = " << w.delta.str() << " (gamma = " << w.word
            << ") fixes z = " << fmt(w.fixed_point.real()) << " + " << fmt(w.fixed_point.imag()) << "i";
        return out.str();
    }
    out << "no fixed point found within bound (" << parabolic << " parabolic, " << hyperbolic << " hyperbolic, "
        << orientation_reversing << " orientation-reversing)";
    return out.str();
}

InvolutionReport involution_analysis(const Mat2& b0, const SubgroupSpec& spec, int word_bound) {
    if (b0.det() != 1 && b0.det() != -1) throw PreconditionViolated("B0 must have determinant +-1");
    InvolutionReport r;
    r.b0 = b0;
    std::map<Mat2, std::string> seen{{psl_key(sl2::Id), ""}};
    std::vector<std::pair<Mat2, std::string>> frontier{{sl2::Id, ""}};
    std::vector<std::pair<Mat2, std::string>> all = frontier;
    const std::pair<Mat2, char> steps[] = {{sl2::S, 'S'}, {sl2::T, 'T'}, {sl2::Tinv, 't'}};
    for (int len = 1; len <= word_bound; ++len) {
        std::vector<std::pair<Mat2, std::string>> next;
        for (const auto& [g, w] : frontier)
            for (const auto& [s, letter] : steps) {
                Mat2 h = g * s;
                if (seen.emplace(psl_key(h), w + letter).second) next.emplace_back(h, w + letter);
            }
        all.insert(all.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    for (auto [g, w] : all) {
        if (!spec.contains(g)) {
            if (!spec.contains(-g)) continue;
            g = -g;
        }
        ++r.elements_examined;
        const std::string word = w.empty() ? "Id" : w;
        Mat2 delta = g * b0;
        switch (classify_motion(delta)) {
            case MotionKind::Identity:
                if (!r.identity_inducing) r.identity_inducing = std::make_pair(g, word);
                break;
            case MotionKind::Elliptic: {
                Mat2 m = delta.c < 0 ? -delta : delta;
                const double tr = static_cast<double>(m.trace());
                std::complex<double> z{static_cast<double>(m.a - m.d) / (2.0 * static_cast<double>(m.c)),
                                       std::sqrt(4.0 - tr * tr) / (2.0 * static_cast<double>(m.c))};
                r.elliptic.push_back({g, word, delta, z});
                break;
            }
            case MotionKind::Parabolic: ++r.parabolic; break;
            case MotionKind::Hyperbolic: ++r.hyperbolic; break;
            case MotionKind::OrientationReversing: ++r.orientation_reversing; break;
        }
    }
    return r;
}

namespace {

constexpr double kWidth = 800, kHeight = 550, kXMin = -1.6, kXMax = 1.6, kYMax = 2.2;
constexpr double kUnit = kWidth / (kXMax - kXMin);

struct Point {
    bool infinite = false;
    double x = 0, y = 0;
};

double px(double x) { return (x - kXMin) * kUnit; }
double py(double y) { return kHeight - std::min(y, kYMax) * kUnit; }

Point image(const Mat2& g, std::complex<double> z) {
    if (std::isinf(z.imag())) {
        if (g.c == 0) return {true, 0, 0};
        return {false, static_cast<double>(g.a) / static_cast<double>(g.c), 0};
    }
    std::complex<double> den = static_cast<double>(g.c) * z + static_cast<double>(g.d);
    if (std::abs(den) < 1e-15) return {true, 0, 0};
    std::complex<double> w = mobius(g, z);
    return {false, w.real(), w.imag()};
}

// path segment from p to q along the geodesic joining them
std::string geodesic_to(const Point& p, const Point& q) {
    if (q.infinite) return "L " + fmt(px(p.x)) + " " + fmt(py(kYMax)) + " ";
    if (p.infinite || std::abs(p.x - q.x) < 1e-12) return "L " + fmt(px(q.x)) + " " + fmt(py(q.y)) + " ";
    const double c = (p.x * p.x + p.y * p.y - q.x * q.x - q.y * q.y) / (2 * (p.x - q.x));
    const double r = std::hypot(p.x - c, p.y) * kUnit;
    return "A " + fmt(r) + " " + fmt(r) + " 0 0 " + (p.x < q.x ? "1" : "0") + " " + fmt(px(q.x)) + " " +
           fmt(py(q.y)) + " ";
}

}  // namespace

std::string render_svg(const FundamentalDomain& fd, const std::string& title) {
    const double s3 = std::sqrt(3.0) / 2;
    const std::complex<double> vertices[] = {{0, INFINITY}, {-0.5, s3}, {0, 1}, {0.5, s3}};
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight + 20.0 * static_cast<double>(fd.edge_pairings.size() + 2) << "\">\n";
    out << "<title>" << title << "</title>\n";
    out << "<line x1=\"0\" y1=\"" << fmt(py(0)) << "\" x2=\"" << kWidth << "\" y2=\"" << fmt(py(0))
        << "\" stroke=\"black\"/>\n";
    std::set<std::pair<std::int64_t, std::int64_t>> cusps;
    for (std::size_t k = 0; k < fd.tiles.size(); ++k) {
        const Mat2& g = fd.tiles[k].second;
        Point v[4];
        for (int i = 0; i < 4; ++i) v[i] = image(g, vertices[i]);
        std::string d;
        if (v[0].infinite) d = "M " + fmt(px(v[1].x)) + " " + fmt(py(kYMax)) + " ";
        else d = "M " + fmt(px(v[0].x)) + " " + fmt(py(v[0].y)) + " ";
        d += geodesic_to(v[0], v[1]) + geodesic_to(v[1], v[2]) + geodesic_to(v[2], v[3]) + geodesic_to(v[3], v[0]);
        out << "<path d=\"" << d << "Z\" fill=\"hsl(" << (k * 47) % 360
            << ",60%,85%)\" stroke=\"black\" stroke-width=\"1\"/>\n";
        Point c = image(g, {0, 1.6});
        if (!c.infinite)
            out << "<text x=\"" << fmt(px(c.x)) << "\" y=\"" << fmt(py(c.y)) << "\" font-size=\"11\" "
                << "text-anchor=\"middle\">" << fd.labels[k] << "</text>\n";
        Cusp q = mobius(g, Cusp{1, 0});
        cusps.emplace(q.p, q.q);
    }
    for (const auto& [p, q] : cusps) {
        if (q == 0) continue;
        const double x = static_cast<double>(p) / static_cast<double>(q);
        out << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(0)) << "\" r=\"3\" fill=\"red\"/>\n";
    }
    double y = kHeight + 18;
    out << "<text x=\"10\" y=\"" << fmt(y) << "\" font-size=\"12\">" << title << ": " << fd.tiles.size()
        << " tiles, edge pairings</text>\n";
    for (const auto& p : fd.edge_pairings) {
        y += 20;
        out << "<text x=\"10\" y=\"" << fmt(y) << "\" font-size=\"12\">" << fd.labels[p.tile] << " "
            << to_string(p.edge) << " ~ " << fd.labels[p.other_tile] << " " << to_string(p.other_edge) << ": "
            << p.gamma.str() << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace flatmod
