#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vvec/errors.hpp"

namespace vvec {

template <typename T>
class Plane {
public:
    Plane() = default;
    Plane(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {
        if (width <= 0 || height <= 0) throw ConfigError("Plane dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& at(int row, int col) { return data_[static_cast<size_t>(row) * width_ + col]; }
    const T& at(int row, int col) const { return data_[static_cast<size_t>(row) * width_ + col]; }

    bool contains(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }

    bool same_shape(const Plane& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const Plane& other) const {
        return width_ == other.width_ && height_ == other.height_ && data_ == other.data_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using PlaneU8 = Plane<uint8_t>;
using PlaneF = Plane<float>;

inline PlaneF to_float(const PlaneU8& p) {
    PlaneF out(p.width(), p.height());
    for (size_t i = 0; i < p.size(); ++i) out.data()[i] = static_cast<float>(p.data()[i]);
    return out;
}

inline PlaneU8 to_u8_clamped(const PlaneF& p) {
    PlaneU8 out(p.width(), p.height());
    for (size_t i = 0; i < p.size(); ++i) {
        float v = p.data()[i];
        out.data()[i] = static_cast<uint8_t>(v < 0.f ? 0.f : (v > 255.f ? 255.f : v + 0.5f));
    }
    return out;
}

}  // namespace vvec
