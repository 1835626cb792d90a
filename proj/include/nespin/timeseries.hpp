// timeseries.hpp — Sampled real-valued signal on a strictly increasing grid.

#pragma once

#include <vector>

#include "nespin/errors.hpp"

namespace nespin {

struct TimeSeries {
    std::vector<double> times;  // us (or rad/us for spectra over frequency)
    std::vector<double> values;

    void validate() const {
        if (times.size() != values.size())
            throw DimensionError("TimeSeries: times and values differ in length");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw DomainError("TimeSeries: times must be strictly increasing");
    }
};

} // namespace nespin
