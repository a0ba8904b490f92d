#pragma once

#include <string>

#include "vvec/geometry.hpp"
#include "vvec/image.hpp"
#include "vvec/sensor.hpp"

namespace vvec {

// Co-registered 3-band scene plus the sidecar metadata the pipeline needs.
struct RasterBundle {
    PlaneU8 red, green, blue;
    SensorModel sensor;
    std::string timestamp;  // ISO-8601 UTC
    std::string scene_id;
    GeoTransform geotransform;

    int width() const { return red.width(); }
    int height() const { return red.height(); }

    const PlaneU8& band(Band b) const {
        switch (b) {
            case Band::Red: return red;
            case Band::Green: return green;
            case Band::Blue: return blue;
        }
        throw ConfigError("invalid band");
    }

    void validate() const {
        if (!red.same_shape(green) || !red.same_shape(blue))
            throw DataError("raster bundle planes have mismatched dimensions");
        sensor.validate();
    }
};

}  // namespace vvec
