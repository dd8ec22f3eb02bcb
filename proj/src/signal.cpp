#include "hobmi/signal.hpp"

#include <utility>

#include "hobmi/error.hpp"

namespace hobmi {

SignalMatrix::SignalMatrix(RowMatrix s, double rate, double start)
    : samples(std::move(s)), fs(rate), t0(start) {
  if (samples.rows() < 1) throw InputError("signal needs at least one channel");
  if (samples.cols() < 2) throw InputError("signal needs at least two samples");
  if (!(fs > 0.0)) throw InputError("sampling rate must be positive");
}

}  // namespace hobmi
