#
# MIT License
#
# (C) Copyright 2025-2026 The rolling-dazzle Authors
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR
# OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE,
# ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR
# OTHER DEALINGS IN THE SOFTWARE.
#

"""
CIE 1924 photopic luminous efficiency V(lambda), 360 nm to 830 nm in 5 nm steps.
"""

PHOTOPIC_START_NM = 360
PHOTOPIC_STEP_NM = 5

PHOTOPIC_EFFICIENCY = (
    3.917e-06, 6.965e-06, 1.239e-05, 2.202e-05, 3.9e-05, 6.4e-05,          # 360-385
    0.00012, 0.000217, 0.000396, 0.00064, 0.00121, 0.00218,                # 390-415
    0.004, 0.0073, 0.0116, 0.01684, 0.023, 0.0298,                         # 420-445
    0.038, 0.048, 0.06, 0.0739, 0.09098, 0.1126,                           # 450-475
    0.13902, 0.1693, 0.20802, 0.2586, 0.323, 0.4073,                       # 480-505
    0.503, 0.6082, 0.71, 0.7932, 0.862, 0.91485,                           # 510-535
    0.954, 0.9803, 0.99495, 1.0, 0.995, 0.9786,                            # 540-565
    0.952, 0.9154, 0.87, 0.8163, 0.757, 0.6949,                            # 570-595
    0.631, 0.5668, 0.503, 0.4412, 0.381, 0.321,                            # 600-625
    0.265, 0.217, 0.175, 0.1382, 0.107, 0.0816,                            # 630-655
    0.061, 0.04458, 0.032, 0.0232, 0.017, 0.01192,                         # 660-685
    0.00821, 0.005723, 0.004102, 0.002929, 0.002091, 0.001484,             # 690-715
    0.001047, 0.00074, 0.00052, 0.0003611, 0.0002492, 0.0001719,           # 720-745
    0.00012, 8.48e-05, 6e-05, 4.24e-05, 3e-05, 2.12e-05,                   # 750-775
    1.499e-05, 1.06e-05, 7.4657e-06, 5.2578e-06, 3.7029e-06, 2.6078e-06,   # 780-805
    1.8366e-06, 1.2934e-06, 9.1093e-07, 6.4153e-07, 4.5181e-07,            # 810-830
)

PHOTOPIC_END_NM = PHOTOPIC_START_NM + PHOTOPIC_STEP_NM * (len(PHOTOPIC_EFFICIENCY) - 1)
