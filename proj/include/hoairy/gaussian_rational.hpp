#ifndef HOAIRY_GAUSSIAN_RATIONAL_HPP
#define HOAIRY_GAUSSIAN_RATIONAL_HPP

#include <complex>
#include <ostream>
#include <string>

#include <gmpxx.h>

#include "errors.hpp"

namespace hoairy {

/// Exact element of Q(i): re + im*i with arbitrary-precision rational parts.
class GaussRational {
public:
    GaussRational() = default;
    GaussRational(long re) : re_(re) {}
    GaussRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussRational i() { return {mpq_class(0), mpq_class(1)}; }
    static GaussRational ratio(long num, long den) { return {mpq_class(num, den)}; }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_imaginary() const { return sgn(re_) == 0; }

    GaussRational conj() const { return {re_, -im_}; }

    GaussRational& operator+=(const GaussRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussRational& operator-=(const GaussRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussRational& operator*=(const GaussRational& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class m = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }
    GaussRational& operator/=(const GaussRational& o) {
        mpq_class den = o.re_ * o.re_ + o.im_ * o.im_;
        if (sgn(den) == 0) fail(ErrorKind::InvalidArgument, "division by zero in Q(i)");
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / den;
        mpq_class m = (im_ * o.re_ - re_ * o.im_) / den;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
    friend GaussRational operator-(const GaussRational& a) { return {-a.re_, -a.im_}; }

    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    /// i^e for any integer e.
    static GaussRational i_pow(long e) {
        switch (((e % 4) + 4) % 4) {
        case 0: return GaussRational(1);
        case 1: return i();
        case 2: return GaussRational(-1);
        default: return -i();
        }
    }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    /// "3/2", "-i", "(1/2-3*i)", ... The inverse is performed by the DiffPoly parser.
    std::string str() const {
        if (is_real()) return re_.get_str();
        if (is_imaginary()) {
            if (im_ == 1) return "i";
            if (im_ == -1) return "-i";
            return im_.get_str() + "*i";
        }
        std::string s = "(" + re_.get_str();
        if (sgn(im_) > 0) s += "+";
        s += (im_ == 1 ? std::string() : im_ == -1 ? std::string("-") : im_.get_str() + "*");
        s += "i)";
        return s;
    }

    friend std::ostream& operator<<(std::ostream& os, const GaussRational& g) { return os << g.str(); }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

} // namespace hoairy

#endif // HOAIRY_GAUSSIAN_RATIONAL_HPP
