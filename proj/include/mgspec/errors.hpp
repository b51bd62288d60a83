#pragma once

#include <stdexcept>
#include <string>

namespace mgspec {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input shapes or graph/subspace dimensions do not agree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A matrix failed one of the orthogonal-projector axioms.
/// Carries which axiom, which matrix, and the measured defect.
class ProjectorAxiomViolation : public Error {
public:
    ProjectorAxiomViolation(std::string axiom, std::string matrix, double defect);
    const std::string& axiom() const { return axiom_; }
    const std::string& matrix() const { return matrix_; }
    double defect() const { return defect_; }

private:
    std::string axiom_;
    std::string matrix_;
    double defect_ = 0.0;
};

/// The coupling matrix is singular on the range it is supposed to act on.
class LambdaNotInvertibleOnRange : public Error {
public:
    explicit LambdaNotInvertibleOnRange(double margin);
    double margin() const { return margin_; }

private:
    double margin_ = 0.0;
};

class NotAProjector : public Error {
public:
    using Error::Error;
};

class AmbientMismatch : public Error {
public:
    using Error::Error;
};

class UnassignedSlot : public Error {
public:
    using Error::Error;
};

class ConflictingAssignment : public Error {
public:
    using Error::Error;
};

class NotAnEigenvalue : public Error {
public:
    using Error::Error;
};

/// Solver-found kernel dimension of the unperturbed operator disagrees with
/// the linear-algebra prediction; signals a tolerance failure, not physics.
class KernelMismatch : public Error {
public:
    KernelMismatch(int solver_dim, int predicted_dim);
    int solver_dim() const { return solver_dim_; }
    int predicted_dim() const { return predicted_dim_; }

private:
    int solver_dim_ = 0;
    int predicted_dim_ = 0;
};

/// The two independent non-resonance computations disagree.
class EquivalenceViolation : public Error {
public:
    EquivalenceViolation(int nrc_dim, int form_nullity);
    int nrc_dim() const { return nrc_dim_; }
    int form_nullity() const { return form_nullity_; }

private:
    int nrc_dim_ = 0;
    int form_nullity_ = 0;
};

/// Problem configuration could not be parsed or failed validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mgspec
