#include "fforge/sl2z.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>

namespace fforge::sl2z {

namespace {

// GL(2,Z) scratch type for continued-fraction convergents, whose determinant
// alternates (-1)^k and so cannot live in Sl2Matrix.
struct Mat2 {
    std::int64_t a, b, c, d;

    Mat2 mul(const Mat2& o) const {
        return {checked_add(checked_mul(a, o.a), checked_mul(b, o.c)),
                checked_add(checked_mul(a, o.b), checked_mul(b, o.d)),
                checked_add(checked_mul(c, o.a), checked_mul(d, o.c)),
                checked_add(checked_mul(c, o.b), checked_mul(d, o.d))};
    }
    std::int64_t det() const { return checked_sub(checked_mul(a, d), checked_mul(b, c)); }
};

// floor((P + sqrt(D))/Q) computed exactly; s = isqrt(D), D non-square, Q != 0.
std::int64_t floor_quad(std::int64_t P, std::int64_t Q, std::int64_t s) {
    if (Q > 0) return floor_div(checked_add(P, s), Q);
    return checked_neg(checked_add(floor_div(checked_add(P, s), checked_neg(Q)), 1));
}

Sl2Matrix factor_matrix(std::int64_t k) {
    return Sl2Matrix(checked_sub(k, 1), -1, 1, 0);
}

void require_triple(std::int64_t p, std::int64_t q, std::int64_t r) {
    if (p < 2 || q < 2 || r < 2) throw DomainError("triple entries must all be >= 2");
}

Sl2Matrix translation(std::int64_t k) { return Sl2Matrix(1, k, 0, 1); }

// P * M * P^-1 = [[1,0],[n,1]] for trace-2 M != I; returns {n, P}.
std::pair<std::int64_t, Sl2Matrix> unipotent_normal(const Sl2Matrix& m) {
    if (m.trace() != 2 || m.is_identity())
        throw DomainError("unipotent normal form needs trace 2 and m != identity");
    // kernel direction of the rank-1 matrix m - I
    std::int64_t x = checked_sub(m.a, 1), y = m.b;
    if (x == 0 && y == 0) {
        x = m.c;
        y = checked_sub(m.d, 1);
    }
    std::int64_t u1 = y, u2 = checked_neg(x);
    std::int64_t g = gcd64(u1, u2);
    u1 /= g;
    u2 /= g;
    std::int64_t bx = 0, by = 0;
    bezout64(u1, u2, bx, by);
    Sl2Matrix p(u2, checked_neg(u1), bx, by);  // p maps u to e2
    Sl2Matrix n = p * m * p.inverse();
    if (n.a != 1 || n.b != 0 || n.d != 1 || n.c == 0)
        throw std::logic_error("unipotent normal form did not land on [[1,0],[n,1]]");
    return {n.c, p};
}

ConjugacyResult conjugate_unipotent(const Sl2Matrix& m1, const Sl2Matrix& m2) {
    auto [n1, p1] = unipotent_normal(m1);
    auto [n2, p2] = unipotent_normal(m2);
    if (n1 != n2) return {};
    return {true, p2.inverse() * p1};
}

// Reduce the fixed point of an elliptic matrix (|trace| <= 1) into the standard
// fundamental domain.  Exact state (P,Q) encodes z = (P + i*sqrt(Dhat))/Q, Q > 0,
// with the loop invariant Q | P^2 + Dhat.  Returns {V*M*V^-1, V}.
std::pair<Sl2Matrix, Sl2Matrix> elliptic_reduce(const Sl2Matrix& m) {
    const std::int64_t t = m.trace();
    const std::int64_t dhat = 4 - t * t;  // 3 or 4
    std::int64_t P, Q;
    if (m.c > 0) {
        P = checked_sub(m.a, m.d);
        Q = checked_mul(2, m.c);
    } else if (m.c < 0) {
        P = checked_sub(m.d, m.a);
        Q = checked_mul(-2, m.c);
    } else {
        throw std::logic_error("elliptic matrix cannot have c == 0");
    }
    if ((checked_add(checked_mul(P, P), dhat)) % Q != 0)
        throw std::logic_error("elliptic reduction invariant broken at start");

    Sl2Matrix v = Sl2Matrix::identity();
    bool done = false;
    for (int guard = 0; guard < 256 && !done; ++guard) {
        // shift Re(z) = P/Q into (-1/2, 1/2]
        std::int64_t k = ceil_div(checked_sub(checked_mul(2, P), Q), checked_mul(2, Q));
        if (k != 0) {
            P = checked_sub(P, checked_mul(k, Q));
            v = translation(checked_neg(k)) * v;
        }
        std::int64_t n2 = checked_add(checked_mul(P, P), dhat);  // |z|^2 * Q^2
        std::int64_t q2 = checked_mul(Q, Q);
        if (n2 < q2 || (n2 == q2 && P < 0)) {
            // z <- -1/z; Q strictly decreases in the interior case
            std::int64_t newQ = n2 / Q;
            P = checked_neg(P);
            Q = newQ;
            v = kS * v;
            continue;
        }
        done = true;
    }
    if (!done) throw std::logic_error("elliptic reduction failed to terminate");
    const bool at_i = (P == 0 && Q == 2 && dhat == 4);
    const bool at_rho = (P == 1 && Q == 2 && dhat == 3);
    if (!at_i && !at_rho)
        throw std::logic_error("elliptic fixed point reduced to a non-elliptic point");
    return {v * m * v.inverse(), v};
}

ConjugacyResult conjugate_elliptic(const Sl2Matrix& m1, const Sl2Matrix& m2) {
    auto [r1, v1] = elliptic_reduce(m1);
    auto [r2, v2] = elliptic_reduce(m2);
    if (r1 != r2) return {};
    return {true, v2.inverse() * v1};
}

// Both traces >= 3.  Words are compared as cyclic strings; the rotation index
// recovers an explicit conjugator.
ConjugacyResult conjugate_hyperbolic(const Sl2Matrix& m1, const Sl2Matrix& m2) {
    RlWord w1 = rl_word(m1);
    RlWord w2 = rl_word(m2);
    if (w1.word.size() != w2.word.size()) return {};
    if (canonical_rotation(w1.word) != canonical_rotation(w2.word)) return {};
    const std::string& s = w1.word;
    const std::size_t n = s.size();
    Sl2Matrix prefix = Sl2Matrix::identity();  // product of s[0..k)
    for (std::size_t k = 0; k < n; ++k) {
        if (s.substr(k) + s.substr(0, k) == w2.word) {
            return {true, w2.conjugator * prefix.inverse() * w1.conjugator.inverse()};
        }
        prefix = prefix * (s[k] == 'R' ? kR : kL);
    }
    throw std::logic_error("cyclic words matched canonically but no rotation aligned");
}

}  // namespace

std::string Sl2Matrix::str() const {
    std::ostringstream os;
    os << "[[" << a << "," << b << "],[" << c << "," << d << "]]";
    return os.str();
}

Sl2Matrix monodromy_matrix(std::int64_t p, std::int64_t q, std::int64_t r) {
    require_triple(p, q, r);
    return factor_matrix(r) * factor_matrix(q) * factor_matrix(p);
}

TraceIdentity trace_identity_check(std::int64_t p, std::int64_t q, std::int64_t r) {
    const Sl2Matrix m = monodromy_matrix(p, q, r);
    const Rational sum = Rational(1, p) + Rational(1, q) + Rational(1, r);
    const std::int64_t pqr = checked_mul(checked_mul(p, q), r);
    const Rational formula = Rational::of(2) + Rational::of(pqr) * (Rational::of(1) - sum);
    return {m.trace(), formula, Rational::of(m.trace()) == formula};
}

SingularityClass classify_singularity(std::int64_t p, std::int64_t q, std::int64_t r) {
    require_triple(p, q, r);
    const Rational sum = Rational(1, p) + Rational(1, q) + Rational(1, r);
    const Rational one = Rational::of(1);
    SingularityKind kind;
    if (sum == one) kind = SingularityKind::SimpleElliptic;
    else if (sum < one) kind = SingularityKind::Cusp;
    else kind = SingularityKind::Other;
    return {kind, p, q, r, sum};
}

ConjugacyType conjugacy_type(const Sl2Matrix& m) {
    const std::int64_t t = m.trace();
    if (t > 2 || t < -2) return {ConjugacyKind::Hyperbolic, t};
    if (t == 2 && !m.is_identity()) return {ConjugacyKind::Unipotent, t};
    if (t == -2 && !m.is_minus_identity()) return {ConjugacyKind::NegativeTrace, t};
    return {ConjugacyKind::FiniteOrder, t};
}

Sl2Matrix word_matrix(const std::string& word) {
    Sl2Matrix acc = Sl2Matrix::identity();
    for (char ch : word) {
        if (ch == 'R') acc = acc * kR;
        else if (ch == 'L') acc = acc * kL;
        else throw DomainError("word may contain only letters R and L");
    }
    return acc;
}

std::string canonical_rotation(const std::string& word) {
    if (word.empty()) return word;
    std::string best = word;
    for (std::size_t k = 1; k < word.size(); ++k) {
        std::string rot = word.substr(k) + word.substr(0, k);
        if (rot < best) best = rot;
    }
    return best;
}

RlWord rl_word(const Sl2Matrix& m) {
    const std::int64_t t = m.trace();
    if (t >= -2 && t <= 2) throw DomainError("rl_word needs a hyperbolic matrix");
    if (t <= -3) throw DomainError("rl_word needs trace >= 3; negate the matrix first");

    const std::int64_t D = checked_sub(checked_mul(t, t), 4);
    const std::int64_t s = isqrt64(D);  // D is never a square for |t| >= 3
    // attracting fixed point of m as a quadratic surd (P + sqrt(D))/Q
    std::int64_t P = checked_sub(m.a, m.d);
    std::int64_t Q = checked_mul(2, m.c);  // c != 0 since |trace| > 2
    if (Q == 0) throw std::logic_error("hyperbolic matrix with c == 0");

    // continued fraction by exact (P,Q) states; Q | D - P^2 throughout
    std::vector<std::int64_t> quot;
    std::vector<Mat2> convs;  // convs[k] = [[p_{k-1},p_{k-2}],[q_{k-1},q_{k-2}]]
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen;
    Mat2 conv{1, 0, 0, 1};
    std::size_t i0 = 0, i1 = 0;
    bool cycled = false;
    for (std::size_t i = 0; i < 100000; ++i) {
        auto key = std::make_pair(P, Q);
        auto it = seen.find(key);
        if (it != seen.end()) {
            i0 = it->second;
            i1 = i;
            cycled = true;
            break;
        }
        seen.emplace(key, i);
        convs.push_back(conv);
        if ((checked_sub(D, checked_mul(P, P))) % Q != 0)
            throw std::logic_error("continued fraction invariant broken");
        const std::int64_t ai = floor_quad(P, Q, s);
        quot.push_back(ai);
        P = checked_sub(checked_mul(ai, Q), P);
        Q = checked_sub(D, checked_mul(P, P)) / Q;
        conv = conv.mul(Mat2{ai, 1, 1, 0});
    }
    if (!cycled) throw std::logic_error("continued fraction failed to cycle");
    convs.push_back(conv);  // convs[i1]

    // realign the cycle window to an even start so the conjugator has det +1
    std::vector<std::int64_t> cyc(quot.begin() + static_cast<std::ptrdiff_t>(i0),
                                  quot.begin() + static_cast<std::ptrdiff_t>(i1));
    if (i0 % 2 != 0) {
        std::rotate(cyc.begin(), cyc.begin() + 1, cyc.end());
        i0 += 1;
    }
    if (cyc.size() % 2 != 0) {
        std::vector<std::int64_t> twice = cyc;
        twice.insert(twice.end(), cyc.begin(), cyc.end());
        cyc.swap(twice);
    }
    for (std::int64_t aq : cyc)
        if (aq < 1) throw std::logic_error("periodic continued-fraction quotient < 1");

    const Mat2 cm = convs[i0];  // i0 <= i1, both stored
    if (cm.det() != 1) throw std::logic_error("conjugator determinant is not +1");
    const Sl2Matrix conj(cm.a, cm.b, cm.c, cm.d);

    // primitive cycle word: blocks a, a' pair up as R^a L^{a'}
    std::string unit;
    for (std::size_t j = 0; j < cyc.size(); j += 2) {
        unit.append(static_cast<std::size_t>(cyc[j]), 'R');
        unit.append(static_cast<std::size_t>(cyc[j + 1]), 'L');
    }
    const Sl2Matrix h = word_matrix(unit);

    // fold in the power: m may be a proper power of the primitive class
    std::string word = unit;
    Sl2Matrix w = h;
    for (int n = 1; n <= 64 && w.trace() < t; ++n) {
        w = w * h;
        word += unit;
    }
    if (w.trace() != t) throw std::logic_error("power folding failed to match the trace");

    if (conj * w * conj.inverse() != m)
        throw std::logic_error("rl_word certificate failed exact verification");
    return {word, conj};
}

std::int64_t unipotent_invariant(const Sl2Matrix& m) {
    return unipotent_normal(m).first;
}

ConjugacyResult are_conjugate(const Sl2Matrix& m1, const Sl2Matrix& m2) {
    if (m1.trace() != m2.trace()) return {};
    if (m1 == m2) return {true, Sl2Matrix::identity()};
    // central elements are conjugate only to themselves
    if (m1.is_identity() || m2.is_identity() || m1.is_minus_identity() || m2.is_minus_identity())
        return {};

    const std::int64_t t = m1.trace();
    ConjugacyResult res;
    if (t >= 3) res = conjugate_hyperbolic(m1, m2);
    else if (t <= -3) res = conjugate_hyperbolic(m1.negated(), m2.negated());
    else if (t == 2) res = conjugate_unipotent(m1, m2);
    else if (t == -2) res = conjugate_unipotent(m1.negated(), m2.negated());
    else res = conjugate_elliptic(m1, m2);

    if (res.conjugate) {
        const Sl2Matrix& p = *res.witness;
        if (p * m1 * p.inverse() != m2)
            throw std::logic_error("conjugacy witness failed exact verification");
    }
    return res;
}

std::optional<Sl2Matrix> brute_force_conjugator(const Sl2Matrix& m1, const Sl2Matrix& m2,
                                                std::int64_t bound) {
    if (bound < 1) throw DomainError("brute_force_conjugator needs bound >= 1");
    if (m1 == m2) return Sl2Matrix::identity();  // trivial witness first
    for (std::int64_t a = -bound; a <= bound; ++a) {
        for (std::int64_t b = -bound; b <= bound; ++b) {
            for (std::int64_t c = -bound; c <= bound; ++c) {
                if (a != 0) {
                    const std::int64_t num = 1 + b * c;
                    if (num % a != 0) continue;
                    const std::int64_t d = num / a;
                    if (d < -bound || d > bound) continue;
                    Sl2Matrix p(a, b, c, d);
                    if (p * m1 == m2 * p) return p;
                } else {
                    if (b * c != -1) continue;
                    for (std::int64_t d = -bound; d <= bound; ++d) {
                        Sl2Matrix p(a, b, c, d);
                        if (p * m1 == m2 * p) return p;
                    }
                }
            }
        }
    }
    return std::nullopt;
}

TopologicalInvariants topological_invariants(std::int64_t p, std::int64_t q, std::int64_t r) {
    require_triple(p, q, r);
    const std::int64_t mu = checked_sub(checked_add(checked_add(p, q), r), 1);
    TopologicalInvariants ti{mu, checked_add(mu, 1), checked_mul(2, checked_add(mu, 1)),
                             std::nullopt};
    if (classify_singularity(p, q, r).kind == SingularityKind::SimpleElliptic)
        ti.eulerNumberIfNil = checked_neg(unipotent_invariant(monodromy_matrix(p, q, r)));
    return ti;
}

}  // namespace fforge::sl2z
