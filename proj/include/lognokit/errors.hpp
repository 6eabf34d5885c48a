#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lognokit {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- ingest ---------------------------------------------------------------

struct MalformedHeader : Error {
  explicit MalformedHeader(const std::string& got)
      : Error("malformed CSV header: \"" + got + "\"") {}
};

struct NonFiniteValue : Error {
  std::size_t row;  // 1-based data row
  explicit NonFiniteValue(std::size_t r)
      : Error("non-finite or unparsable value at data row " +
              std::to_string(r)),
        row(r) {}
};

struct NonMonotonicTime : Error {
  std::size_t row;  // 1-based data row
  explicit NonMonotonicTime(std::size_t r)
      : Error("timestamps not strictly increasing at data row " +
              std::to_string(r)),
        row(r) {}
};

struct TooFewSamples : Error {
  TooFewSamples() : Error("operation needs at least 2 samples") {}
};

struct InsufficientOverlap : Error {
  InsufficientOverlap()
      : Error("logs overlap by less than 1 s within the allowed lag") {}
};

struct FlatSignal : Error {
  FlatSignal()
      : Error("acceleration magnitude has zero variance; "
              "cross-correlation undefined") {}
};

// --- preprocess -----------------------------------------------------------

struct InvalidCutoff : Error {
  InvalidCutoff(double cutoff_hz, double rate_hz)
      : Error("cutoff " + std::to_string(cutoff_hz) +
              " Hz outside (0, " + std::to_string(rate_hz / 2.0) + ")") {}
};

// --- segmentation ---------------------------------------------------------

struct WindowLongerThanLog : Error {
  WindowLongerThanLog() : Error("window longer than the log") {}
};

// --- classify ---------------------------------------------------------------

struct SegmentTooShort : Error {
  SegmentTooShort() : Error("segment shorter than 2 samples") {}
};

struct DegenerateDataset : Error {
  explicit DegenerateDataset(const std::string& why)
      : Error("degenerate training set: " + why) {}
};

struct NoConvergence : Error {
  std::size_t iterations;
  explicit NoConvergence(std::size_t iters)
      : Error("SMO did not satisfy the KKT tolerance within " +
              std::to_string(iters) + " pair updates"),
        iterations(iters) {}
};

struct DimensionMismatch : Error {
  DimensionMismatch() : Error("feature vector dimension mismatch") {}
};

struct TooFewExamplesPerClass : Error {
  TooFewExamplesPerClass()
      : Error("a class has fewer examples than cross-validation folds") {}
};

// --- siglognormal -----------------------------------------------------------

struct NoPeak : Error {
  NoPeak() : Error("residual has no strictly positive peak") {}
};

struct IllConditioned : Error {
  IllConditioned() : Error("half-max characteristic points not found") {}
};

struct DegenerateInput : Error {
  explicit DegenerateInput(const std::string& why)
      : Error("degenerate input: " + why) {}
};

struct ZeroSignal : Error {
  ZeroSignal() : Error("observed signal has zero energy") {}
};

// --- report -----------------------------------------------------------------

struct EmptySample : Error {
  EmptySample() : Error("rank test samples must be non-empty") {}
};

struct TooFewReports : Error {
  TooFewReports() : Error("cohort statistics need at least 2 reports") {}
};

struct InvalidConfig : Error {
  explicit InvalidConfig(const std::string& why)
      : Error("invalid config: " + why) {}
};

}  // namespace lognokit
