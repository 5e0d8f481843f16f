def logged(fn):
    def wrapper(x):
        return fn(x) + 1
    return wrapper

@logged
def base(x):
    return x * 10

def run(x):
    return base(x)

print(run(2))
