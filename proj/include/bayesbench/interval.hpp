#pragma once

namespace bayesbench {

/// Closed interval [low, high].
struct Interval {
  double low = 0;
  double high = 0;
  double width() const { return high - low; }
};

}  // namespace bayesbench
