// Served from a CDN subdomain of the publisher.
window.__pub = window.__pub || {};
window.__pub.detect = function detect() {
  var el = document.createElement("div");
  el.className = "banner_ad";
  document.body.appendChild(el);
  var gone = el.offsetWidth === 0;
  document.body.removeChild(el);
  return gone;
};
if (window.__pub.detect()) {
  window.__pub.nag = true;
}
