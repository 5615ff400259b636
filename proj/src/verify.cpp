namespace planefield::verify {}
