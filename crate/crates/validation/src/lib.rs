//! Holds the `acceptance` test target, which runs every end-to-end
//! experiment and prints one PASS or FAIL line per criterion.
