namespace planefield::fields {}
