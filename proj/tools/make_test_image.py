#!/usr/bin/env python3
# Regenerates data/test_image_64x64.pgm: a smooth synthetic grayscale scene
# (low-frequency waves plus a few soft blobs) that compresses well in a DCT
# basis. ASCII PGM (P2) so the file stays inspectable. Committed output.
import math

SIDE = 64


def scene(i, j):
    u = i / (SIDE - 1.0)
    v = j / (SIDE - 1.0)
    val = 118.0
    val += 52.0 * math.sin(2.1 * math.pi * u) * math.cos(1.3 * math.pi * v)
    val += 30.0 * math.cos(0.9 * math.pi * (u + v))
    for (ci, cj, amp, rad) in [(0.28, 0.64, 46.0, 0.16),
                               (0.70, 0.30, -38.0, 0.20),
                               (0.62, 0.78, 28.0, 0.12)]:
        d2 = (u - ci) ** 2 + (v - cj) ** 2
        val += amp * math.exp(-d2 / (2 * rad * rad))
    return max(0, min(255, int(round(val))))


def main():
    pix = [[scene(i, j) for j in range(SIDE)] for i in range(SIDE)]
    with open('data/test_image_64x64.pgm', 'w') as f:
        f.write('P2\n# synthetic smooth test scene\n%d %d\n255\n' % (SIDE, SIDE))
        for row in pix:
            f.write(' '.join(str(p) for p in row) + '\n')
    print('wrote data/test_image_64x64.pgm')


if __name__ == '__main__':
    main()
