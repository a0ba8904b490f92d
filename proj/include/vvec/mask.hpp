#pragma once

#include <string>
#include <vector>

#include "vvec/image.hpp"

namespace vvec {

// Per-class score planes (0-255); the interface between any mask source
// (classical detector, rendered truth, or an external model) and the
// vectorization pipeline.
struct ProbMask {
    std::vector<PlaneU8> planes;
    std::vector<std::string> class_labels;

    void validate() const {
        if (planes.size() != class_labels.size())
            throw DataError("ProbMask: plane/label count mismatch");
        for (size_t i = 1; i < planes.size(); ++i)
            if (!planes[i].same_shape(planes[0]))
                throw DataError("ProbMask: planes have mismatched shapes");
        for (size_t i = 0; i < class_labels.size(); ++i)
            for (size_t j = i + 1; j < class_labels.size(); ++j)
                if (class_labels[i] == class_labels[j])
                    throw DataError("ProbMask: duplicate class label " + class_labels[i]);
    }
};

struct BinaryMask {
    std::vector<Plane<uint8_t>> planes;  // 0 or 1
    std::vector<std::string> class_labels;
};

}  // namespace vvec
