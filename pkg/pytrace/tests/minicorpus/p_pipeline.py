def make_scaler(k):
    def scale(x):
        return x * k
    return scale

def apply_all(fn, xs):
    out = []
    for x in xs:
        out.append(fn(x))
    return out

def run():
    s3 = make_scaler(3)
    return apply_all(s3, [1, 2])

print(",".join(str(v) for v in run()))
