#pragma once

// Dense operator algebra on n-spin Hilbert spaces.
//
// Basis convention: a basis index b in [0, 2^n) encodes one bit per site with
// site 0 as the most significant bit; bit value 0 is spin up (sigma^z = +1).

#include "qbattery/detail/lapack.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qbattery {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kReconstructionTol = 1e-10;
inline constexpr double kNegativeEigenvalueClip = 1e-10;
inline constexpr double kDegeneracyTol = 1e-10;
inline constexpr int kMaxSites = 14;

enum class Axis { x, y, z };

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_error(const Matrix& m) { return max_abs(m - m.adjoint()); }

// Number of sites n such that dim == 2^n, or throws.
inline int sites_for_dimension(Index dim) {
    if (dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(dim)))
        throw std::domain_error("dimension " + std::to_string(dim) + " is not a power of two >= 2");
    return std::countr_zero(static_cast<std::uint64_t>(dim));
}

inline std::uint64_t site_bit(int site, int n) { return std::uint64_t{1} << (n - 1 - site); }

class Operator {
public:
    Operator() = default;

    explicit Operator(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw std::domain_error("operator matrix must be square");
        sites_ = sites_for_dimension(m_.rows());
        hermitian_ = hermiticity_error(m_) <= kHermitianTol;
    }

    static Operator identity(int n) { return Operator(Matrix::Identity(Index{1} << n, Index{1} << n)); }

    const Matrix& matrix() const { return m_; }
    Index dim() const { return m_.rows(); }
    int sites() const { return sites_; }
    bool is_hermitian() const { return hermitian_; }

    friend Operator operator+(const Operator& a, const Operator& b) { return Operator(a.m_ + b.m_); }
    friend Operator operator-(const Operator& a, const Operator& b) { return Operator(a.m_ - b.m_); }
    friend Operator operator*(const Operator& a, const Operator& b) { return Operator(a.m_ * b.m_); }
    friend Operator operator*(cplx s, const Operator& a) { return Operator(s * a.m_); }
    friend Operator operator*(double s, const Operator& a) { return Operator(s * a.m_); }

private:
    Matrix m_;
    int sites_ = 0;
    bool hermitian_ = false;
};

inline Operator kron(const Operator& a, const Operator& b) {
    const Matrix& x = a.matrix();
    const Matrix& y = b.matrix();
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Index i = 0; i < x.rows(); ++i)
        for (Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return Operator(std::move(out));
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

class StateVector {
public:
    StateVector() = default;

    explicit StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
        sites_ = sites_for_dimension(v_.size());
        if (std::abs(v_.norm() - 1.0) > kNormTol)
            throw std::domain_error("state vector is not normalized (norm=" + std::to_string(v_.norm()) + ")");
    }

    static StateVector normalized(Vector v) {
        const double nrm = v.norm();
        if (nrm == 0.0)
            throw std::domain_error("cannot normalize the zero vector");
        return StateVector(v / nrm);
    }

    const Vector& amplitudes() const { return v_; }
    Index dim() const { return v_.size(); }
    int sites() const { return sites_; }

private:
    Vector v_;
    int sites_ = 0;
};

enum class Order { ascending, descending };

struct SpectralDecomposition {
    RealVector values;
    Matrix vectors;  // column j pairs with values(j)
    Order order = Order::ascending;

    Matrix reconstruct() const { return vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint(); }
};

namespace detail {

// Rotate each column by a unit phase so its largest-magnitude entry is real
// and positive (first index wins among near-equal magnitudes).
inline void fix_column_phases(Matrix& v) {
    for (Index j = 0; j < v.cols(); ++j) {
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < v.rows(); ++i) {
            const double a = std::abs(v(i, j));
            if (a > best + 1e-12) {
                best = a;
                arg = i;
            }
        }
        if (best > 0.0)
            v.col(j) *= std::conj(v(arg, j)) / best;
    }
}

inline double leading_real_part(const Matrix& v, Index col) {
    for (Index i = 0; i < v.rows(); ++i)
        if (std::abs(v(i, col)) > 1e-12)
            return v(i, col).real();
    return 0.0;
}

// Sort by the declared order; inside a degenerate group, order columns by
// the real part of their first nonzero amplitude, largest first.
inline SpectralDecomposition finalize_spectrum(RealVector values, Matrix vectors, Order order) {
    fix_column_phases(vectors);
    const Index n = values.size();
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    const double sign = order == Order::ascending ? 1.0 : -1.0;
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        return sign * values(a) < sign * values(b);
    });
    std::size_t group = 0;
    while (group < idx.size()) {
        std::size_t end = group + 1;
        while (end < idx.size() && std::abs(values(idx[end]) - values(idx[group])) <= kDegeneracyTol)
            ++end;
        std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(group),
                         idx.begin() + static_cast<std::ptrdiff_t>(end), [&](Index a, Index b) {
                             return leading_real_part(vectors, a) > leading_real_part(vectors, b);
                         });
        group = end;
    }
    SpectralDecomposition out;
    out.order = order;
    out.values.resize(n);
    out.vectors.resize(vectors.rows(), n);
    for (Index j = 0; j < n; ++j) {
        out.values(j) = values(idx[static_cast<std::size_t>(j)]);
        out.vectors.col(j) = vectors.col(idx[static_cast<std::size_t>(j)]);
    }
    return out;
}

inline bool is_real(const Matrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

}  // namespace detail

// Full eigendecomposition of a Hermitian matrix.
inline SpectralDecomposition eig_hermitian(const Matrix& m, Order order = Order::ascending) {
    if (m.rows() != m.cols() || hermiticity_error(m) > kHermitianTol)
        throw std::domain_error("eig_hermitian: input is not Hermitian");
    RealVector values;
    Matrix vectors;
    if (detail::is_real(m)) {
        RealMatrix a = m.real();
        values = detail::syevd(a);
        vectors = a.cast<cplx>();
    } else {
        Matrix a = m;
        values = detail::heevd(a);
        vectors = std::move(a);
    }
    return detail::finalize_spectrum(std::move(values), std::move(vectors), order);
}

inline SpectralDecomposition eig_hermitian(const Operator& op, Order order = Order::ascending) {
    if (!op.is_hermitian())
        throw std::domain_error("eig_hermitian: operator is not Hermitian");
    return eig_hermitian(op.matrix(), order);
}

// The `count` lowest eigenpairs, ascending.
inline SpectralDecomposition lowest_eigenpairs(const Operator& op, int count) {
    if (!op.is_hermitian())
        throw std::domain_error("lowest_eigenpairs: operator is not Hermitian");
    if (count < 1 || count > op.dim())
        throw std::domain_error("lowest_eigenpairs: invalid count");
    RealVector values;
    Matrix vectors;
    if (detail::is_real(op.matrix())) {
        RealMatrix a = op.matrix().real();
        RealMatrix z;
        values = detail::syevr_lowest(a, count, z);
        vectors = z.cast<cplx>();
    } else {
        Matrix a = op.matrix();
        values = detail::heevr_lowest(a, count, vectors);
    }
    return detail::finalize_spectrum(std::move(values), std::move(vectors), Order::ascending);
}

class DensityMatrix {
public:
    DensityMatrix() = default;

    // Validates Hermiticity, unit trace and positivity.
    explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw std::domain_error("density matrix must be square");
        sites_ = sites_for_dimension(m_.rows());
        if (hermiticity_error(m_) > kHermitianTol)
            throw std::domain_error("density matrix is not Hermitian");
        if (std::abs(m_.trace() - cplx{1.0}) > kTraceTol)
            throw std::domain_error("density matrix trace differs from 1");
        const auto spec = eig_hermitian(m_, Order::ascending);
        if (spec.values(0) < -kNegativeEigenvalueClip)
            throw std::domain_error("density matrix has eigenvalue " + std::to_string(spec.values(0)));
    }

    // For producers whose output is valid by construction.
    static DensityMatrix unchecked(Matrix m) {
        DensityMatrix d;
        d.sites_ = sites_for_dimension(m.rows());
        d.m_ = std::move(m);
        return d;
    }

    static DensityMatrix pure(const StateVector& psi) {
        return unchecked(psi.amplitudes() * psi.amplitudes().adjoint());
    }

    static DensityMatrix maximally_mixed(int n) {
        const Index dim = Index{1} << n;
        return unchecked(Matrix::Identity(dim, dim) / static_cast<double>(dim));
    }

    const Matrix& matrix() const { return m_; }
    Index dim() const { return m_.rows(); }
    int sites() const { return sites_; }

private:
    Matrix m_;
    int sites_ = 0;
};

// Eigendecomposition of a density matrix, descending, with tiny negative
// eigenvalues clipped to zero and the rest renormalized.
inline SpectralDecomposition density_spectrum(const DensityMatrix& rho) {
    auto spec = eig_hermitian(rho.matrix(), Order::descending);
    for (Index i = 0; i < spec.values.size(); ++i) {
        if (spec.values(i) < -kNegativeEigenvalueClip)
            throw std::domain_error("density matrix has eigenvalue " + std::to_string(spec.values(i)));
        if (spec.values(i) < 0.0)
            spec.values(i) = 0.0;
    }
    spec.values /= spec.values.sum();
    return spec;
}

// Product of single-site Pauli matrices on distinct sites, with a complex
// prefactor. Acts on basis states as
//   P|b> = i^{#y} (-1)^{popcount(b & sign)} |b xor flip>.
class PauliString {
public:
    PauliString() = default;

    PauliString(int n, std::vector<std::pair<Axis, int>> factors) : n_(n) {
        if (n < 1 || n > 62)
            throw std::domain_error("PauliString: unsupported site count");
        std::uint64_t used = 0;
        for (auto [axis, site] : factors) {
            if (site < 0 || site >= n)
                throw std::domain_error("PauliString: site " + std::to_string(site) + " out of range");
            const std::uint64_t bit = site_bit(site, n);
            if (used & bit)
                throw std::domain_error("PauliString: repeated site " + std::to_string(site));
            used |= bit;
            switch (axis) {
                case Axis::x: flip_ |= bit; break;
                case Axis::z: sign_ |= bit; break;
                case Axis::y:
                    flip_ |= bit;
                    sign_ |= bit;
                    ++y_count_;
                    break;
            }
        }
    }

    int sites() const { return n_; }
    std::uint64_t flip_mask() const { return flip_; }

    // Amplitude picked up by basis state b.
    cplx phase(std::uint64_t b) const {
        static constexpr cplx kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const cplx p = kPowI[y_count_ % 4];
        return (std::popcount(b & sign_) & 1) ? -p : p;
    }

    std::uint64_t target(std::uint64_t b) const { return b ^ flip_; }

private:
    int n_ = 0;
    std::uint64_t flip_ = 0;
    std::uint64_t sign_ = 0;
    int y_count_ = 0;
};

// Weighted sum of Pauli strings; the sparse form of the chain Hamiltonians.
class PauliSum {
public:
    struct Term {
        cplx coefficient;
        PauliString string;
    };

    PauliSum() = default;
    explicit PauliSum(int n) : n_(n) {}

    void add(cplx coefficient, PauliString s) {
        if (s.sites() != n_)
            throw std::domain_error("PauliSum: site count mismatch");
        terms_.push_back({coefficient, std::move(s)});
    }
    void add(double coefficient, std::vector<std::pair<Axis, int>> factors) {
        add(cplx{coefficient}, PauliString(n_, std::move(factors)));
    }

    int sites() const { return n_; }
    Index dim() const { return Index{1} << n_; }
    const std::vector<Term>& terms() const { return terms_; }

    friend PauliSum operator+(PauliSum a, const PauliSum& b) {
        if (a.n_ != b.n_)
            throw std::domain_error("PauliSum: site count mismatch");
        a.terms_.insert(a.terms_.end(), b.terms_.begin(), b.terms_.end());
        return a;
    }

    Vector apply(const Vector& v) const {
        if (v.size() != dim())
            throw std::domain_error("PauliSum::apply: dimension mismatch");
        Vector out = Vector::Zero(v.size());
        for (const auto& t : terms_)
            for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(v.size()); ++b)
                out(static_cast<Index>(t.string.target(b))) += t.coefficient * t.string.phase(b) * v(static_cast<Index>(b));
        return out;
    }

    // <v|P|v> for an unnormalized vector.
    double expectation(const Vector& v) const { return v.dot(apply(v)).real(); }

    // Tr[P rho].
    cplx trace_with(const Matrix& rho) const {
        if (rho.rows() != dim())
            throw std::domain_error("PauliSum::trace_with: dimension mismatch");
        cplx acc = 0.0;
        for (const auto& t : terms_) {
            cplx s = 0.0;
            for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(rho.rows()); ++c)
                s += t.string.phase(c) * rho(static_cast<Index>(c), static_cast<Index>(t.string.target(c)));
            acc += t.coefficient * s;
        }
        return acc;
    }

    Matrix dense() const {
        Matrix m = Matrix::Zero(dim(), dim());
        for (const auto& t : terms_)
            for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim()); ++b)
                m(static_cast<Index>(t.string.target(b)), static_cast<Index>(b)) += t.coefficient * t.string.phase(b);
        return m;
    }

    Operator to_operator() const { return Operator(dense()); }

private:
    int n_ = 0;
    std::vector<Term> terms_;
};

// Single-site Pauli matrix embedded at `site` of an n-site register.
inline Operator pauli(Axis axis, int site, int n) {
    if (n < 1 || n > kMaxSites)
        throw std::domain_error("pauli: site count out of range");
    if (site < 0 || site >= n)
        throw std::domain_error("pauli: site " + std::to_string(site) + " out of range for n=" + std::to_string(n));
    PauliSum s(n);
    s.add(1.0, {{axis, site}});
    return s.to_operator();
}

// Contiguous block of sites on a ring of n sites.
struct SiteBlock {
    int start = 0;
    int length = 0;

    std::vector<int> sites(int n) const {
        std::vector<int> out;
        for (int k = 0; k < length; ++k)
            out.push_back((start + k) % n);
        return out;
    }

    std::vector<int> complement(int n) const {
        std::vector<int> out;
        for (int k = length; k < n; ++k)
            out.push_back((start + k) % n);
        std::sort(out.begin(), out.end());
        return out;
    }
};

// Global basis index for every (kept-index, rest-index) pair, laid out
// row-major as kept * dim_rest + rest. Kept sites are ordered as given, first
// site most significant; the rest keep ascending site order.
class Bipartition {
public:
    Bipartition(const std::vector<int>& kept, int n) : n_(n), kept_(static_cast<int>(kept.size())) {
        std::vector<bool> in(static_cast<std::size_t>(n), false);
        for (int s : kept) {
            if (s < 0 || s >= n || in[static_cast<std::size_t>(s)])
                throw std::domain_error("Bipartition: invalid kept site list");
            in[static_cast<std::size_t>(s)] = true;
        }
        std::vector<int> rest;
        for (int s = 0; s < n; ++s)
            if (!in[static_cast<std::size_t>(s)])
                rest.push_back(s);
        dim_kept_ = Index{1} << kept.size();
        dim_rest_ = Index{1} << rest.size();
        map_.resize(static_cast<std::size_t>(dim_kept_ * dim_rest_));
        for (Index k = 0; k < dim_kept_; ++k) {
            for (Index r = 0; r < dim_rest_; ++r) {
                std::uint64_t b = 0;
                for (std::size_t j = 0; j < kept.size(); ++j)
                    if ((k >> (kept.size() - 1 - j)) & 1)
                        b |= site_bit(kept[j], n);
                for (std::size_t j = 0; j < rest.size(); ++j)
                    if ((r >> (rest.size() - 1 - j)) & 1)
                        b |= site_bit(rest[j], n);
                map_[static_cast<std::size_t>(k * dim_rest_ + r)] = static_cast<Index>(b);
            }
        }
    }

    Index global(Index kept, Index rest) const { return map_[static_cast<std::size_t>(kept * dim_rest_ + rest)]; }
    Index dim_kept() const { return dim_kept_; }
    Index dim_rest() const { return dim_rest_; }
    int sites() const { return n_; }

    // psi reshaped to dim_kept x dim_rest.
    Matrix reshape(const Vector& psi) const {
        Matrix out(dim_kept_, dim_rest_);
        for (Index k = 0; k < dim_kept_; ++k)
            for (Index r = 0; r < dim_rest_; ++r)
                out(k, r) = psi(global(k, r));
        return out;
    }

    Vector flatten(const Matrix& m) const {
        Vector out(dim_kept_ * dim_rest_);
        for (Index k = 0; k < dim_kept_; ++k)
            for (Index r = 0; r < dim_rest_; ++r)
                out(global(k, r)) = m(k, r);
        return out;
    }

private:
    int n_;
    int kept_;
    Index dim_kept_ = 0;
    Index dim_rest_ = 0;
    std::vector<Index> map_;
};

inline void check_block(const SiteBlock& keep, int n) {
    if (keep.length <= 0 || keep.length >= n)
        throw std::domain_error("partial_trace: keep set must be non-empty and leave at least one site");
    if (keep.start < 0 || keep.start >= n)
        throw std::domain_error("partial_trace: block start out of range");
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const SiteBlock& keep, int n) {
    if (rho.sites() != n)
        throw std::domain_error("partial_trace: site count mismatch");
    check_block(keep, n);
    const Bipartition split(keep.sites(n), n);
    Matrix out = Matrix::Zero(split.dim_kept(), split.dim_kept());
    const Matrix& m = rho.matrix();
    for (Index a = 0; a < split.dim_kept(); ++a)
        for (Index b = 0; b < split.dim_kept(); ++b) {
            cplx s = 0.0;
            for (Index r = 0; r < split.dim_rest(); ++r)
                s += m(split.global(a, r), split.global(b, r));
            out(a, b) = s;
        }
    return DensityMatrix::unchecked(0.5 * (out + out.adjoint()));
}

// Tr[op rho]; the imaginary residue must stay below 1e-10.
inline double expval(const Operator& op, const DensityMatrix& rho) {
    if (op.dim() != rho.dim())
        throw std::domain_error("expval: dimension mismatch");
    if (!op.is_hermitian())
        throw std::domain_error("expval: operator is not Hermitian");
    const cplx t = op.matrix().cwiseProduct(rho.matrix().transpose()).sum();
    if (std::abs(t.imag()) > 1e-10)
        throw std::runtime_error("expval: imaginary residue " + std::to_string(t.imag()));
    return t.real();
}

inline double expval(const Operator& op, const StateVector& psi) {
    if (op.dim() != psi.dim())
        throw std::domain_error("expval: dimension mismatch");
    return psi.amplitudes().dot(op.matrix() * psi.amplitudes()).real();
}

// Apply a 2^k x 2^k matrix acting on the listed sites (first site most
// significant) to a full register vector.
inline Vector apply_local(const Matrix& u, const Bipartition& split, const Vector& psi) {
    if (u.rows() != split.dim_kept() || u.cols() != split.dim_kept())
        throw std::domain_error("apply_local: operator does not match the local space");
    return split.flatten(u * split.reshape(psi));
}

// Convex mixture of pure states, sum_k w_k |psi_k><psi_k|. Every initial
// state of the cycle (pure ground, mixed ground, Gibbs) has this form.
class EnsembleState {
public:
    EnsembleState() = default;

    EnsembleState(RealVector weights, Matrix states) : w_(std::move(weights)), psi_(std::move(states)) {
        if (w_.size() != psi_.cols() || w_.size() == 0)
            throw std::domain_error("EnsembleState: weight/state count mismatch");
        sites_ = sites_for_dimension(psi_.rows());
        if ((w_.array() < 0.0).any() || std::abs(w_.sum() - 1.0) > kTraceTol)
            throw std::domain_error("EnsembleState: weights must be a probability vector");
    }

    explicit EnsembleState(const StateVector& psi)
        : EnsembleState(RealVector::Ones(1), Matrix(psi.amplitudes())) {}

    // Spectral ensemble of a density matrix.
    explicit EnsembleState(const DensityMatrix& rho) {
        auto spec = density_spectrum(rho);
        Index keep = 0;
        while (keep < spec.values.size() && spec.values(keep) > 0.0)
            ++keep;
        *this = EnsembleState(spec.values.head(keep) / spec.values.head(keep).sum(), spec.vectors.leftCols(keep));
    }

    const RealVector& weights() const { return w_; }
    const Matrix& states() const { return psi_; }
    Index size() const { return w_.size(); }
    Index dim() const { return psi_.rows(); }
    int sites() const { return sites_; }

    double expval(const PauliSum& h) const {
        double acc = 0.0;
        for (Index k = 0; k < size(); ++k)
            acc += w_(k) * h.expectation(psi_.col(k));
        return acc;
    }

    double expval(const Operator& op) const {
        double acc = 0.0;
        for (Index k = 0; k < size(); ++k)
            acc += w_(k) * psi_.col(k).dot(op.matrix() * psi_.col(k)).real();
        return acc;
    }

    DensityMatrix density() const {
        Matrix rho = psi_ * w_.cast<cplx>().asDiagonal() * psi_.adjoint();
        return DensityMatrix::unchecked(0.5 * (rho + rho.adjoint()));
    }

    // Reduced state on the kept side of `split`.
    DensityMatrix reduce(const Bipartition& split) const {
        Matrix out = Matrix::Zero(split.dim_kept(), split.dim_kept());
        for (Index k = 0; k < size(); ++k) {
            const Matrix m = split.reshape(psi_.col(k));
            out += w_(k) * (m * m.adjoint());
        }
        return DensityMatrix::unchecked(0.5 * (out + out.adjoint()));
    }

    EnsembleState transformed(const Matrix& u, const Bipartition& split) const {
        Matrix out(psi_.rows(), psi_.cols());
        for (Index k = 0; k < size(); ++k)
            out.col(k) = apply_local(u, split, psi_.col(k));
        EnsembleState e;
        e.w_ = w_;
        e.psi_ = std::move(out);
        e.sites_ = sites_;
        return e;
    }

private:
    RealVector w_;
    Matrix psi_;
    int sites_ = 0;
};

inline DensityMatrix partial_trace(const EnsembleState& state, const SiteBlock& keep, int n) {
    if (state.sites() != n)
        throw std::domain_error("partial_trace: site count mismatch");
    check_block(keep, n);
    return state.reduce(Bipartition(keep.sites(n), n));
}

}  // namespace qbattery
