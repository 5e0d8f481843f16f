class MathKit {
    static int square(int x) {
        return x * x;
    }
    static int cube(int x) {
        return x * square(x);
    }
}
public class Main {
    public static void main(String[] args) {
        System.out.println(MathKit.cube(3));
    }
}
