#pragma once

#include <stdexcept>
#include <string>

namespace fsols {

// Malformed or inconsistent input data (manifests, configs, model artifacts).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failure talking to a bibliographic service or fetcher backend.
class ServiceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fsols
