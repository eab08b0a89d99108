#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catcast/core.hpp"
#include "catcast/mat.hpp"

namespace catcast {

enum class EncodingKind { integer, binary, hashing, one_hot, embedding };

const char* to_string(EncodingKind kind);
EncodingKind encoding_from_string(const std::string& s);

struct EncodingScheme {
    EncodingKind kind = EncodingKind::one_hot;
    int buckets = 256;  // hashing only

    void validate() const;
};

// index as a real number; 0 is the UNK code
double integer_encode(int index, int cardinality);

// width of the binary code for a vocabulary of n categories (UNK included
// thanks to the +1)
int binary_width(int cardinality);

// big-endian base-2 digits; UNK(0) is all zeros
std::vector<double> binary_encode(int index, int width);

// FNV-1a 64-bit of the UTF-8 bytes, reduced mod buckets
int hash_encode(const std::string& value, int buckets);

// length cardinality+1 indicator vector; slot 0 is UNK
std::vector<double> one_hot(int index, int cardinality);

// columns a single variable contributes under a scheme
int encoded_width(const EncodingScheme& scheme, int cardinality);

struct EncodedMatrix {
    Mat values;
    std::vector<std::string> column_names;
};

// per-variable encodings concatenated column-wise in schema order
EncodedMatrix encode_table(const Table& table, const EncodingScheme& scheme,
                           const std::vector<std::string>& input_variables);

// same, over a row subset; rows of `out` follow the order of `rows`
EncodedMatrix encode_rows(const Table& table, const std::vector<std::size_t>& rows,
                          const EncodingScheme& scheme,
                          const std::vector<std::string>& input_variables);

} // namespace catcast
