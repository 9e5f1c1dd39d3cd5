"""Online Orthogonal Vectors: data structures, reductions and hardness constructions."""
