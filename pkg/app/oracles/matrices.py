import numpy as np


def matmul_reference(s, t) -> np.ndarray:
    return np.asarray(s, dtype=np.int64) @ np.asarray(t, dtype=np.int64)


def triangle_reference(a) -> int:
    a = np.asarray(a, dtype=np.int64)
    return int(np.trace(a @ a @ a)) // 6


def triangle_bruteforce(a) -> int:
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if not a[i, j]:
                continue
            for k in range(j + 1, n):
                if a[i, k] and a[j, k]:
                    count += 1
    return count
