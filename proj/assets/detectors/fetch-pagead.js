// Requests the ad-serving endpoint directly and reports failures.
function flagAdblock(reason) {
  navigator.sendBeacon("/metrics", JSON.stringify({ adblock: true, reason: reason }));
  document.getElementById("content").classList.add("blurred");
}

fetch("https://pagead2.googlesyndication.com/pagead/js/adsbygoogle.js", { mode: "no-cors" })
  .then(function () {})
  .catch(function (e) { flagAdblock(String(e)); });
