#pragma once

#include <stdexcept>
#include <string>

namespace lmknn {

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class insufficient_samples : public error {
public:
  using error::error;
};

class degenerate_signal : public error {
public:
  using error::error;
};

class shape_error : public error {
public:
  using error::error;
};

class invalid_split : public error {
public:
  using error::error;
};

class invalid_triple : public error {
public:
  using error::error;
};

class invalid_argument : public error {
public:
  using error::error;
};

class insufficient_class_size : public error {
public:
  using error::error;
};

class numerical_error : public error {
public:
  using error::error;
};

class training_error : public error {
public:
  using error::error;
};

class io_error : public error {
public:
  using error::error;
};

}  // namespace lmknn
