#ifndef HOAIRY_DIFFRING_HPP
#define HOAIRY_DIFFRING_HPP

// Differential polynomials in u_1..u_k and their t-derivatives, extended by the
// scalar generators t and x_1..x_k, with exact coefficients in Q(i).
//
// D is the total t-derivative: D u_j^(m) = u_j^(m+1), D t = 1, D x_j = 0.

#include <algorithm>
#include <cctype>
#include <compare>
#include <complex>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "gaussian_rational.hpp"

namespace hoairy {

// ---------------------------------------------------------------------------
// Generators and monomials
// ---------------------------------------------------------------------------

/// One generator of the ring: a derivative D^order u_component, the time t,
/// or a threshold x_component. Components are 1-based.
struct Generator {
    enum class Kind : unsigned char { U = 0, T = 1, X = 2 };

    Kind kind = Kind::U;
    int component = 1;
    int order = 0;

    static Generator u(int j, int m = 0) {
        if (j < 1 || m < 0) fail(ErrorKind::InvalidArgument, "u-generator needs j >= 1, order >= 0");
        return {Kind::U, j, m};
    }
    static Generator t() { return {Kind::T, 0, 0}; }
    static Generator x(int j) {
        if (j < 1) fail(ErrorKind::InvalidArgument, "x-generator needs j >= 1");
        return {Kind::X, j, 0};
    }

    bool is_u() const { return kind == Kind::U; }
    bool is_t() const { return kind == Kind::T; }
    bool is_x() const { return kind == Kind::X; }

    // u-generators by (component, order), then t, then the x_j.
    friend auto operator<=>(const Generator& a, const Generator& b) {
        return std::tie(a.kind, a.component, a.order) <=> std::tie(b.kind, b.component, b.order);
    }
    friend bool operator==(const Generator& a, const Generator& b) = default;

    /// u1, Du1, D2u1, t, x1
    std::string name() const {
        switch (kind) {
        case Kind::T: return "t";
        case Kind::X: return "x" + std::to_string(component);
        case Kind::U:
            break;
        }
        std::string prefix = order == 0 ? "" : order == 1 ? "D" : "D" + std::to_string(order);
        return prefix + "u" + std::to_string(component);
    }

    static Generator parse(std::string_view s) {
        auto digits = [&](std::string_view d) {
            if (d.empty() || !std::all_of(d.begin(), d.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
                fail(ErrorKind::ParseError, "bad generator name '" + std::string(s) + "'");
            return std::stoi(std::string(d));
        };
        if (s == "t") return t();
        if (!s.empty() && s[0] == 'x') return x(digits(s.substr(1)));
        int order = 0;
        std::string_view rest = s;
        if (!rest.empty() && rest[0] == 'D') {
            auto upos = rest.find('u');
            if (upos == std::string_view::npos) fail(ErrorKind::ParseError, "bad generator name '" + std::string(s) + "'");
            order = upos == 1 ? 1 : digits(rest.substr(1, upos - 1));
            rest = rest.substr(upos);
        }
        if (rest.empty() || rest[0] != 'u') fail(ErrorKind::ParseError, "bad generator name '" + std::string(s) + "'");
        return u(digits(rest.substr(1)), order);
    }
};

/// Product of generator powers, kept sorted by generator with positive exponents.
class Monomial {
public:
    using Factor = std::pair<Generator, int>;

    Monomial() = default;
    explicit Monomial(Generator g, int power = 1) {
        if (power > 0) factors_.emplace_back(g, power);
    }
    static Monomial from_factors(std::vector<Factor> fs) {
        Monomial m;
        std::sort(fs.begin(), fs.end(), [](const Factor& a, const Factor& b) { return a.first < b.first; });
        for (auto& [g, p] : fs) {
            if (p < 0) fail(ErrorKind::InvalidArgument, "negative exponent in monomial");
            if (p == 0) continue;
            if (!m.factors_.empty() && m.factors_.back().first == g)
                m.factors_.back().second += p;
            else
                m.factors_.emplace_back(g, p);
        }
        return m;
    }

    const std::vector<Factor>& factors() const { return factors_; }
    bool is_one() const { return factors_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& f : factors_) d += f.second;
        return d;
    }
    int degree_in(const Generator& g) const {
        for (const auto& [h, p] : factors_)
            if (h == g) return p;
        return 0;
    }
    bool has_u() const {
        return std::any_of(factors_.begin(), factors_.end(), [](const Factor& f) { return f.first.is_u(); });
    }
    bool has_t() const { return degree_in(Generator::t()) > 0; }
    /// Highest derivative order among u-factors, -1 when there are none.
    int max_order() const {
        int m = -1;
        for (const auto& f : factors_)
            if (f.first.is_u()) m = std::max(m, f.first.order);
        return m;
    }

    /// this * g^power
    Monomial times(const Generator& g, int power = 1) const {
        if (power == 0) return *this;
        Monomial r = *this;
        auto it = std::lower_bound(r.factors_.begin(), r.factors_.end(), g,
                                   [](const Factor& f, const Generator& h) { return f.first < h; });
        if (it != r.factors_.end() && it->first == g) {
            it->second += power;
            if (it->second < 0) fail(ErrorKind::InvalidArgument, "negative exponent in monomial");
            if (it->second == 0) r.factors_.erase(it);
        } else {
            if (power < 0) fail(ErrorKind::InvalidArgument, "negative exponent in monomial");
            r.factors_.insert(it, {g, power});
        }
        return r;
    }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial r;
        r.factors_.reserve(a.factors_.size() + b.factors_.size());
        auto i = a.factors_.begin();
        auto j = b.factors_.begin();
        while (i != a.factors_.end() || j != b.factors_.end()) {
            if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first))
                r.factors_.push_back(*i++);
            else if (i == a.factors_.end() || j->first < i->first)
                r.factors_.push_back(*j++);
            else {
                r.factors_.emplace_back(i->first, i->second + j->second);
                ++i;
                ++j;
            }
        }
        return r;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) = default;

    std::string str() const {
        if (factors_.empty()) return "1";
        std::string s;
        for (const auto& [g, p] : factors_) {
            if (!s.empty()) s += "*";
            s += g.name();
            if (p != 1) s += "^" + std::to_string(p);
        }
        return s;
    }

private:
    std::vector<Factor> factors_;
};

/// Graded order: total degree first, then lexicographic on factors.
struct MonomialOrder {
    bool operator()(const Monomial& a, const Monomial& b) const {
        int da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        const auto& fa = a.factors();
        const auto& fb = b.factors();
        return std::lexicographical_compare(fa.begin(), fa.end(), fb.begin(), fb.end(),
                                            [](const Monomial::Factor& x, const Monomial::Factor& y) {
                                                if (x.first != y.first) return x.first < y.first;
                                                return x.second > y.second;
                                            });
    }
};

// ---------------------------------------------------------------------------
// DiffPoly
// ---------------------------------------------------------------------------

class DiffPoly {
public:
    using Terms = std::map<Monomial, GaussRational, MonomialOrder>;

    DiffPoly() = default;
    DiffPoly(GaussRational c) { add_term(Monomial{}, std::move(c)); }
    DiffPoly(long c) : DiffPoly(GaussRational(c)) {}

    static DiffPoly gen(const Generator& g) { return term(1, Monomial(g)); }
    static DiffPoly u(int j, int m = 0) { return gen(Generator::u(j, m)); }
    static DiffPoly t() { return gen(Generator::t()); }
    static DiffPoly x(int j) { return gen(Generator::x(j)); }
    static DiffPoly i() { return DiffPoly(GaussRational::i()); }
    static DiffPoly term(GaussRational c, Monomial m) {
        DiffPoly p;
        p.add_term(std::move(m), std::move(c));
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Adds c*m, keeping the canonical form (no zero coefficients).
    void add_term(const Monomial& m, const GaussRational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    GaussRational coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? GaussRational{} : it->second;
    }
    GaussRational constant_term() const { return coefficient(Monomial{}); }

    /// Highest u-derivative order present, -1 if the polynomial has no u-factors.
    int max_order() const {
        int m = -1;
        for (const auto& [mono, c] : terms_) m = std::max(m, mono.max_order());
        return m;
    }
    /// Highest derivative order of u_j present, -1 if absent.
    int max_order(int j) const {
        int m = -1;
        for (const auto& [mono, c] : terms_)
            for (const auto& [g, p] : mono.factors())
                if (g.is_u() && g.component == j) m = std::max(m, g.order);
        return m;
    }
    std::set<int> components() const {
        std::set<int> js;
        for (const auto& [mono, c] : terms_)
            for (const auto& [g, p] : mono.factors())
                if (g.is_u()) js.insert(g.component);
        return js;
    }

    DiffPoly& operator+=(const DiffPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    DiffPoly& operator-=(const DiffPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    DiffPoly& operator*=(const GaussRational& s) {
        if (s.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_) c *= s;
        return *this;
    }

    friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
    friend DiffPoly operator-(DiffPoly a) { return a *= GaussRational(-1); }
    friend DiffPoly operator*(DiffPoly a, const GaussRational& s) { return a *= s; }
    friend DiffPoly operator*(const GaussRational& s, DiffPoly a) { return a *= s; }
    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
        DiffPoly r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    DiffPoly& operator*=(const DiffPoly& o) { return *this = *this * o; }

    friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const DiffPoly& a, const DiffPoly& b) { return !(a == b); }

    DiffPoly pow(int e) const {
        if (e < 0) fail(ErrorKind::InvalidArgument, "negative power of a DiffPoly");
        DiffPoly r(1), b = *this;
        while (e > 0) {
            if (e & 1) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    }

    /// Rebuilds the term map from scratch. Construction already keeps the
    /// canonical form, so this is the identity on any reachable value.
    DiffPoly normalized() const {
        DiffPoly r;
        for (const auto& [m, c] : terms_) r.add_term(Monomial::from_factors(m.factors()), c);
        return r;
    }

    std::string str() const;

private:
    Terms terms_;
};

// ---------------------------------------------------------------------------
// Derivations
// ---------------------------------------------------------------------------

/// Total derivative of a single generator.
inline DiffPoly total_derivative(const Generator& g) {
    switch (g.kind) {
    case Generator::Kind::U: return DiffPoly::u(g.component, g.order + 1);
    case Generator::Kind::T: return DiffPoly(1);
    case Generator::Kind::X: return DiffPoly();
    }
    return DiffPoly();
}

inline DiffPoly total_derivative(const DiffPoly& p) {
    DiffPoly r;
    for (const auto& [mono, c] : p.terms()) {
        for (const auto& [g, e] : mono.factors()) {
            if (g.is_x()) continue;
            Monomial rest = mono.times(g, -1);
            GaussRational coeff = c * GaussRational(e);
            if (g.is_t())
                r.add_term(rest, coeff);
            else
                r.add_term(rest.times(Generator::u(g.component, g.order + 1)), coeff);
        }
    }
    return r;
}

inline DiffPoly total_derivative(const DiffPoly& p, int times) {
    DiffPoly r = p;
    for (int m = 0; m < times; ++m) r = total_derivative(r);
    return r;
}

/// Partial derivative with respect to one generator, all others held fixed.
inline DiffPoly partial(const DiffPoly& p, const Generator& g) {
    DiffPoly r;
    for (const auto& [mono, c] : p.terms()) {
        int e = mono.degree_in(g);
        if (e == 0) continue;
        r.add_term(mono.times(g, -1), c * GaussRational(e));
    }
    return r;
}

/// Variational derivative sum_m (-D)^m dp/du_j^(m).
inline DiffPoly euler_operator(const DiffPoly& p, int j) {
    DiffPoly r;
    int top = p.max_order(j);
    for (int m = top; m >= 0; --m) {
        // Horner form: r <- dp/du^(m) - D r
        r = partial(p, Generator::u(j, m)) - total_derivative(r);
    }
    return r;
}

/// Component of p that D annihilates: terms free of every u-generator and of t.
inline DiffPoly kernel_part(const DiffPoly& p) {
    DiffPoly r;
    for (const auto& [m, c] : p.terms())
        if (!m.has_u() && !m.has_t()) r.add_term(m, c);
    return r;
}

namespace detail {

inline Error not_exact(const std::string& what) { return Error(ErrorKind::NotExact, what); }

} // namespace detail

/// Returns the first component whose variational derivative does not vanish,
/// together with that derivative; component 0 means p is exact.
inline std::pair<int, DiffPoly> exactness_obstruction(const DiffPoly& p) {
    for (int j : p.components()) {
        DiffPoly e = euler_operator(p, j);
        if (!e.is_zero()) return {j, e};
    }
    return {0, DiffPoly()};
}

inline bool is_exact(const DiffPoly& p) { return exactness_obstruction(p).first == 0; }

/// D^{-1}: the unique q with D q = p and no term in the kernel of D.
/// Throws NotExact when p is not a total derivative.
inline DiffPoly formal_antiderivative(const DiffPoly& p) {
    if (auto [j, e] = exactness_obstruction(p); j != 0)
        throw detail::not_exact("not a total derivative: delta/delta u" + std::to_string(j) + " = " + e.str());

    DiffPoly rest = p;
    DiffPoly q;
    // Peel the top derivative order: the order-m part of an exact polynomial is
    // sum_i P_i u_i^(m) with P = grad_y Q in the variables y_i = u_i^(m-1);
    // Q is recovered term by term with the homogeneous (Euler) homotopy formula.
    for (int m = rest.max_order(); m >= 1; m = rest.max_order()) {
        DiffPoly step;
        for (const auto& [mono, c] : rest.terms()) {
            int top_degree = 0;
            Generator top;
            for (const auto& [g, e] : mono.factors()) {
                if (g.is_u() && g.order == m) {
                    top_degree += e;
                    top = g;
                }
            }
            if (top_degree == 0) continue;
            if (top_degree > 1)
                throw detail::not_exact("nonlinear in the top derivative order: " + mono.str());
            Monomial lowered = mono.times(top, -1).times(Generator::u(top.component, m - 1));
            int ydeg = 0;
            for (const auto& [g, e] : lowered.factors())
                if (g.is_u() && g.order == m - 1) ydeg += e;
            step.add_term(lowered, c / GaussRational(ydeg));
        }
        rest -= total_derivative(step);
        q += step;
        if (rest.max_order() >= m)
            throw detail::not_exact("integration by parts does not close at order " + std::to_string(m));
    }
    for (const auto& [mono, c] : rest.terms()) {
        if (mono.has_u()) throw detail::not_exact("undifferentiated u-term left over: " + mono.str());
        // polynomial in (t, x): integrate in t
        int a = mono.degree_in(Generator::t());
        q.add_term(mono.times(Generator::t()), c / GaussRational(a + 1));
    }
    return q;
}

// ---------------------------------------------------------------------------
// Substitution and evaluation
// ---------------------------------------------------------------------------

/// Sets u_j and all its derivatives to zero.
inline DiffPoly drop_component(const DiffPoly& p, int j) {
    DiffPoly r;
    for (const auto& [mono, c] : p.terms()) {
        bool has = std::any_of(mono.factors().begin(), mono.factors().end(), [&](const Monomial::Factor& f) {
            return f.first.is_u() && f.first.component == j;
        });
        if (!has) r.add_term(mono, c);
    }
    return r;
}

/// Relabels u_j -> u_{perm[j-1]} and x_j -> x_{perm[j-1]}.
inline DiffPoly permute_components(const DiffPoly& p, const std::vector<int>& perm) {
    DiffPoly r;
    for (const auto& [mono, c] : p.terms()) {
        std::vector<Monomial::Factor> fs;
        for (auto [g, e] : mono.factors()) {
            if (!g.is_t()) {
                if (g.component < 1 || g.component > static_cast<int>(perm.size()))
                    fail(ErrorKind::DimensionMismatch, "permutation too short for " + g.name());
                g.component = perm[g.component - 1];
            }
            fs.emplace_back(g, e);
        }
        r.add_term(Monomial::from_factors(std::move(fs)), c);
    }
    return r;
}

namespace detail {

template <class V>
V coeff_as(const GaussRational& c) {
    if constexpr (std::is_same_v<V, GaussRational>)
        return c;
    else
        return V(c.to_complex());
}

template <class V>
V ipow(V b, int e) {
    V r(1);
    while (e > 0) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

} // namespace detail

/// Evaluates p with every generator replaced by value_of(generator).
/// V is std::complex<double> or GaussRational (exact substitution).
template <class V, class ValueOf>
V evaluate(const DiffPoly& p, ValueOf&& value_of) {
    V sum(0);
    for (const auto& [mono, c] : p.terms()) {
        V term = detail::coeff_as<V>(c);
        for (const auto& [g, e] : mono.factors()) term = term * detail::ipow<V>(value_of(g), e);
        sum = sum + term;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Vectors and matrices over the ring
// ---------------------------------------------------------------------------

class VecDiffPoly {
public:
    VecDiffPoly() = default;
    explicit VecDiffPoly(std::size_t k) : entries_(k) {}
    VecDiffPoly(std::initializer_list<DiffPoly> xs) : entries_(xs) {}
    explicit VecDiffPoly(std::vector<DiffPoly> xs) : entries_(std::move(xs)) {}

    /// (u_1, ..., u_k)
    static VecDiffPoly u(std::size_t k) {
        VecDiffPoly v(k);
        for (std::size_t j = 0; j < k; ++j) v[j] = DiffPoly::u(static_cast<int>(j) + 1);
        return v;
    }
    /// e_j, 1-based
    static VecDiffPoly unit(std::size_t k, std::size_t j) {
        VecDiffPoly v(k);
        v[j - 1] = DiffPoly(1);
        return v;
    }

    std::size_t size() const { return entries_.size(); }
    DiffPoly& operator[](std::size_t j) { return entries_[j]; }
    const DiffPoly& operator[](std::size_t j) const { return entries_[j]; }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    bool is_zero() const {
        return std::all_of(entries_.begin(), entries_.end(), [](const DiffPoly& p) { return p.is_zero(); });
    }

    VecDiffPoly& operator+=(const VecDiffPoly& o) {
        check_same(o);
        for (std::size_t j = 0; j < size(); ++j) entries_[j] += o[j];
        return *this;
    }
    VecDiffPoly& operator-=(const VecDiffPoly& o) {
        check_same(o);
        for (std::size_t j = 0; j < size(); ++j) entries_[j] -= o[j];
        return *this;
    }
    friend VecDiffPoly operator+(VecDiffPoly a, const VecDiffPoly& b) { return a += b; }
    friend VecDiffPoly operator-(VecDiffPoly a, const VecDiffPoly& b) { return a -= b; }
    friend VecDiffPoly operator-(VecDiffPoly a) {
        for (auto& e : a.entries_) e = -e;
        return a;
    }
    friend VecDiffPoly operator*(const DiffPoly& s, VecDiffPoly a) {
        for (auto& e : a.entries_) e = s * e;
        return a;
    }
    friend VecDiffPoly operator*(const GaussRational& s, VecDiffPoly a) {
        for (auto& e : a.entries_) e *= s;
        return a;
    }
    friend bool operator==(const VecDiffPoly& a, const VecDiffPoly& b) { return a.entries_ == b.entries_; }

    void check_same(const VecDiffPoly& o) const {
        if (o.size() != size())
            fail(ErrorKind::DimensionMismatch,
                 "vector lengths differ: " + std::to_string(size()) + " vs " + std::to_string(o.size()));
    }

private:
    std::vector<DiffPoly> entries_;
};

/// Dense rows x cols matrix of DiffPoly. Square k x k for the bracket forms;
/// the Lax blocks also use 1 x k rows and k x 1 columns.
class MatDiffPoly {
public:
    MatDiffPoly() = default;
    MatDiffPoly(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    explicit MatDiffPoly(std::size_t k) : MatDiffPoly(k, k) {}

    static MatDiffPoly identity(std::size_t k) {
        MatDiffPoly m(k);
        for (std::size_t j = 0; j < k; ++j) m(j, j) = DiffPoly(1);
        return m;
    }
    static MatDiffPoly column(const VecDiffPoly& v) {
        MatDiffPoly m(v.size(), 1);
        for (std::size_t j = 0; j < v.size(); ++j) m(j, 0) = v[j];
        return m;
    }
    static MatDiffPoly row(const VecDiffPoly& v) {
        MatDiffPoly m(1, v.size());
        for (std::size_t j = 0; j < v.size(); ++j) m(0, j) = v[j];
        return m;
    }
    static MatDiffPoly scalar(const DiffPoly& p) {
        MatDiffPoly m(1, 1);
        m(0, 0) = p;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    DiffPoly& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const DiffPoly& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const DiffPoly& p) { return p.is_zero(); });
    }

    MatDiffPoly transpose() const {
        MatDiffPoly t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }
    DiffPoly trace() const {
        DiffPoly s;
        for (std::size_t j = 0; j < std::min(rows_, cols_); ++j) s += (*this)(j, j);
        return s;
    }
    VecDiffPoly as_vector() const {
        if (cols_ != 1 && rows_ != 1) fail(ErrorKind::DimensionMismatch, "matrix is not a row or column");
        VecDiffPoly v(rows_ * cols_);
        for (std::size_t j = 0; j < rows_ * cols_; ++j) v[j] = data_[j];
        return v;
    }

    template <class F>
    MatDiffPoly map(F&& f) const {
        MatDiffPoly r(rows_, cols_);
        for (std::size_t j = 0; j < data_.size(); ++j) r.data_[j] = f(data_[j]);
        return r;
    }

    MatDiffPoly& operator+=(const MatDiffPoly& o) {
        check_shape(o);
        for (std::size_t j = 0; j < data_.size(); ++j) data_[j] += o.data_[j];
        return *this;
    }
    MatDiffPoly& operator-=(const MatDiffPoly& o) {
        check_shape(o);
        for (std::size_t j = 0; j < data_.size(); ++j) data_[j] -= o.data_[j];
        return *this;
    }
    friend MatDiffPoly operator+(MatDiffPoly a, const MatDiffPoly& b) { return a += b; }
    friend MatDiffPoly operator-(MatDiffPoly a, const MatDiffPoly& b) { return a -= b; }
    friend MatDiffPoly operator-(MatDiffPoly a) {
        for (auto& e : a.data_) e = -e;
        return a;
    }
    friend MatDiffPoly operator*(const GaussRational& s, MatDiffPoly a) {
        for (auto& e : a.data_) e *= s;
        return a;
    }
    friend MatDiffPoly operator*(const DiffPoly& s, MatDiffPoly a) {
        for (auto& e : a.data_) e = s * e;
        return a;
    }
    friend MatDiffPoly operator*(const MatDiffPoly& a, const MatDiffPoly& b) {
        if (a.cols_ != b.rows_)
            fail(ErrorKind::DimensionMismatch, "matrix product shape mismatch");
        MatDiffPoly r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t l = 0; l < a.cols_; ++l) {
                const DiffPoly& ail = a(i, l);
                if (ail.is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (!b(l, j).is_zero()) r(i, j) += ail * b(l, j);
            }
        return r;
    }
    friend bool operator==(const MatDiffPoly& a, const MatDiffPoly& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    void check_shape(const MatDiffPoly& o) const {
        if (o.rows_ != rows_ || o.cols_ != cols_)
            fail(ErrorKind::DimensionMismatch, "matrix shapes differ");
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<DiffPoly> data_;
};

inline VecDiffPoly total_derivative(const VecDiffPoly& v) {
    VecDiffPoly r(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) r[j] = total_derivative(v[j]);
    return r;
}
inline MatDiffPoly total_derivative(const MatDiffPoly& m) {
    return m.map([](const DiffPoly& p) { return total_derivative(p); });
}

/// Matrix-vector product.
inline VecDiffPoly operator*(const MatDiffPoly& m, const VecDiffPoly& v) {
    if (m.cols() != v.size()) fail(ErrorKind::DimensionMismatch, "matrix-vector shape mismatch");
    VecDiffPoly r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero() && !v[j].is_zero()) r[i] += m(i, j) * v[j];
    return r;
}

/// <v, w> = v^T w, bilinear (no conjugation).
inline DiffPoly inner(const VecDiffPoly& v, const VecDiffPoly& w) {
    v.check_same(w);
    DiffPoly s;
    for (std::size_t j = 0; j < v.size(); ++j) s += v[j] * w[j];
    return s;
}

/// {v, w} = v w^T + w v^T
inline MatDiffPoly sym_bracket(const VecDiffPoly& v, const VecDiffPoly& w) {
    v.check_same(w);
    MatDiffPoly m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * w[j] + w[i] * v[j];
    return m;
}

/// [v, w] = v w^T - w v^T
inline MatDiffPoly antisym_bracket(const VecDiffPoly& v, const VecDiffPoly& w) {
    v.check_same(w);
    MatDiffPoly m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * w[j] - w[i] * v[j];
    return m;
}

// ---------------------------------------------------------------------------
// Text and JSON forms
// ---------------------------------------------------------------------------

inline std::string DiffPoly::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        // Coefficients with a single nonzero part carry their sign outside.
        bool negative = (c.is_real() && sgn(c.re()) < 0) || (c.is_imaginary() && sgn(c.im()) < 0);
        GaussRational mag = negative ? -c : c;
        if (first)
            s += negative ? "-" : "";
        else
            s += negative ? " - " : " + ";
        first = false;

        std::string coeff;
        if (mag.is_real()) {
            coeff = mag.re().get_den() == 1 ? mag.re().get_str() : "(" + mag.re().get_str() + ")";
        } else if (mag.is_imaginary()) {
            if (mag.im() == 1)
                coeff = "i";
            else
                coeff = (mag.im().get_den() == 1 ? mag.im().get_str() : "(" + mag.im().get_str() + ")") + "*i";
        } else {
            coeff = mag.str();
        }
        if (m.is_one())
            s += coeff;
        else if (mag.is_one())
            s += m.str();
        else
            s += coeff + "*" + m.str();
    }
    return s;
}

inline std::ostream& operator<<(std::ostream& os, const DiffPoly& p) { return os << p.str(); }

namespace detail {

/// Recursive-descent parser for the text form. Accepts sums and differences of
/// products of integers, i, generator names, powers, division by constants and
/// parentheses; everything DiffPoly::str() emits.
class DiffPolyParser {
public:
    explicit DiffPolyParser(std::string_view src) : src_(src) {}

    DiffPoly parse() {
        DiffPoly p = expr();
        skip_ws();
        if (pos_ != src_.size()) error("trailing input");
        return p;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorKind::ParseError, what + " at offset " + std::to_string(pos_) + " in '" + std::string(src_) + "'");
    }
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    DiffPoly expr() {
        DiffPoly acc;
        bool negate = false;
        if (eat('-'))
            negate = true;
        else
            eat('+');
        DiffPoly first = term();
        acc = negate ? -first : first;
        for (;;) {
            if (eat('+'))
                acc += term();
            else if (eat('-'))
                acc -= term();
            else
                break;
        }
        return acc;
    }

    DiffPoly term() {
        DiffPoly acc = power();
        for (;;) {
            if (eat('*')) {
                acc = acc * power();
            } else if (eat('/')) {
                DiffPoly d = power();
                if (d.size() > 1 || !d.terms().begin()->first.is_one()) error("division by a non-constant");
                if (d.is_zero()) error("division by zero");
                acc *= GaussRational(1) / d.constant_term();
            } else {
                break;
            }
        }
        return acc;
    }

    DiffPoly power() {
        DiffPoly base = atom();
        if (eat('^')) {
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (start == pos_) error("expected exponent");
            base = base.pow(std::stoi(std::string(src_.substr(start, pos_ - start))));
        }
        return base;
    }

    DiffPoly atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            DiffPoly inner = expr();
            if (!eat(')')) error("expected ')'");
            return inner;
        }
        if (c == '-') {
            ++pos_;
            return -power();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            return DiffPoly(GaussRational(mpq_class(std::string(src_.substr(start, pos_ - start)))));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            std::string_view name = src_.substr(start, pos_ - start);
            if (name == "i") return DiffPoly::i();
            return DiffPoly::gen(Generator::parse(name));
        }
        error("unexpected character");
    }
};

} // namespace detail

inline DiffPoly parse_diffpoly(std::string_view text) { return detail::DiffPolyParser(text).parse(); }

/// [{coeff_re, coeff_im, monomial: [[gen, power], ...]}, ...] with exact
/// rational strings for the coefficient parts.
inline nlohmann::json to_json(const DiffPoly& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, c] : p.terms()) {
        nlohmann::json mono = nlohmann::json::array();
        for (const auto& [g, e] : m.factors()) mono.push_back({g.name(), e});
        terms.push_back({{"coeff_re", c.re().get_str()}, {"coeff_im", c.im().get_str()}, {"monomial", mono}});
    }
    return terms;
}

inline DiffPoly diffpoly_from_json(const nlohmann::json& j) {
    if (!j.is_array()) fail(ErrorKind::ParseError, "DiffPoly JSON must be an array of terms");
    DiffPoly p;
    try {
        for (const auto& t : j) {
            mpq_class re(t.at("coeff_re").get<std::string>());
            mpq_class im(t.at("coeff_im").get<std::string>());
            std::vector<Monomial::Factor> fs;
            for (const auto& f : t.at("monomial"))
                fs.emplace_back(Generator::parse(f.at(0).get<std::string>()), f.at(1).get<int>());
            p.add_term(Monomial::from_factors(std::move(fs)), GaussRational(re, im));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, std::string("malformed DiffPoly JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        fail(ErrorKind::ParseError, std::string("malformed rational in DiffPoly JSON: ") + e.what());
    }
    return p;
}

inline nlohmann::json to_json(const VecDiffPoly& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : v) a.push_back(to_json(p));
    return a;
}

inline nlohmann::json to_json(const MatDiffPoly& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

} // namespace hoairy

#endif // HOAIRY_DIFFRING_HPP
