public class Main {
    static int find(int[] xs, int lo, int hi, int target) {
        if (lo > hi) {
            return -1;
        }
        int mid = (lo + hi) / 2;
        if (xs[mid] == target) {
            return mid;
        }
        if (xs[mid] < target) {
            return find(xs, mid + 1, hi, target);
        }
        return find(xs, lo, mid - 1, target);
    }
    public static void main(String[] args) {
        int[] xs = {2, 5, 8, 11, 14};
        System.out.println(find(xs, 0, 4, 11));
        System.out.println(find(xs, 0, 4, 3));
    }
}
